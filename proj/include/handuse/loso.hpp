#pragma once

#include <span>
#include <string>
#include <vector>

namespace handuse {

/// One leave-one-subject-out fold.
struct LosoFold {
    std::string held_out;
    std::vector<std::string> training;
    bool operator==(const LosoFold&) const = default;
};

struct LosoSplit {
    std::vector<LosoFold> folds;
};

/// One fold per participant, in input order. Needs >= 2 distinct ids.
LosoSplit make_loso(std::span<const std::string> participant_ids);

struct SplitCheck {
    bool ok = true;
    std::string reason;
    explicit operator bool() const { return ok; }
};

/// Checks that held-out sets are disjoint singletons covering `cohort`, and that each
/// fold trains on exactly the rest of the cohort.
SplitCheck verify_loso(const LosoSplit& split, std::span<const std::string> cohort);

/// Checks the participant ids of the samples actually fed to a fold's training.
SplitCheck verify_fold_data(const LosoFold& fold, std::span<const std::string> training_sample_ids);

}  // namespace handuse
