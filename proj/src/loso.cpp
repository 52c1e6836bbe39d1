#include "handuse/loso.hpp"

#include <set>

#include "handuse/error.hpp"

namespace handuse {

LosoSplit make_loso(std::span<const std::string> ids) {
    std::set<std::string> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second) throw ArgumentError("duplicate participant id '" + id + "'");
    if (ids.size() < 2) throw ArgumentError("leave-one-subject-out needs at least 2 participants");
    LosoSplit split;
    for (const auto& held : ids) {
        LosoFold fold{held, {}};
        for (const auto& other : ids)
            if (other != held) fold.training.push_back(other);
        split.folds.push_back(std::move(fold));
    }
    return split;
}

SplitCheck verify_loso(const LosoSplit& split, std::span<const std::string> cohort) {
    const std::set<std::string> members(cohort.begin(), cohort.end());
    std::set<std::string> held;
    for (const auto& fold : split.folds) {
        if (!members.count(fold.held_out)) return {false, "held-out '" + fold.held_out + "' is not in the cohort"};
        if (!held.insert(fold.held_out).second) return {false, "'" + fold.held_out + "' is held out twice"};
        std::set<std::string> train;
        for (const auto& id : fold.training) {
            if (id == fold.held_out) return {false, "fold for '" + fold.held_out + "' trains on its held-out participant"};
            if (!members.count(id)) return {false, "training id '" + id + "' is not in the cohort"};
            if (!train.insert(id).second) return {false, "training id '" + id + "' repeated"};
        }
        if (train.size() + 1 != members.size())
            return {false, "fold for '" + fold.held_out + "' does not train on the rest of the cohort"};
    }
    if (held != members) return {false, "held-out participants do not cover the cohort"};
    return {};
}

SplitCheck verify_fold_data(const LosoFold& fold, std::span<const std::string> training_sample_ids) {
    for (const auto& id : training_sample_ids)
        if (id == fold.held_out)
            return {false, "training data for fold '" + fold.held_out + "' contains held-out samples"};
    return {};
}

}  // namespace handuse
