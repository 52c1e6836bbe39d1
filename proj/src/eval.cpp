#include "handuse/eval.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

#include "handuse/error.hpp"

namespace handuse {

namespace {

std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_string(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

using ProfileKey = std::tuple<std::string, HandSide>;

}  // namespace

F1Score f1(const ConfusionCounts& c) {
    const auto denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) return {0.0, true};
    return {2.0 * static_cast<double>(c.tp) / static_cast<double>(denom), false};
}

ParticipantScore score_participant(const std::string& participant_id, std::span<const InteractionProfile> predictions,
                                   std::span<const AnnotationRecord> annotations) {
    std::map<ProfileKey, const InteractionProfile*> index;
    for (const auto& p : predictions)
        if (p.participant_id == participant_id) index[{p.session_id, p.hand_side}] = &p;

    ParticipantScore out;
    out.participant_id = participant_id;
    for (const auto& a : annotations) {
        if (a.participant_id != participant_id) continue;
        auto it = index.find({a.session_id, a.hand_side});
        if (it == index.end())
            throw ArgumentError("no prediction for participant '" + participant_id + "' session '" + a.session_id +
                                "' hand " + std::string(to_string(a.hand_side)));
        const auto& bits = it->second->bits;
        if (a.frame_index < 0 || a.frame_index >= static_cast<std::int64_t>(bits.size()))
            throw RangeError("annotation frame " + std::to_string(a.frame_index) + " beyond profile of " +
                             std::to_string(bits.size()) + " frames (session '" + a.session_id + "')");
        const bool pred = bits[static_cast<std::size_t>(a.frame_index)] != 0;
        const bool label = a.label != 0;
        if (pred && label)
            ++out.counts.tp;
        else if (pred)
            ++out.counts.fp;
        else if (label)
            ++out.counts.fn;
        else
            ++out.counts.tn;
        out.frame_set_digest +=
            mix(hash_string(a.session_id) ^ mix(static_cast<std::uint64_t>(a.frame_index) * 2 +
                                                (a.hand_side == HandSide::Right ? 1 : 0)));
    }
    out.f1 = f1(out.counts);
    return out;
}

CohortSummary summarize_cohort(std::span<const double> f1_scores) {
    if (f1_scores.empty()) throw ArgumentError("summarize_cohort needs at least one participant");
    CohortSummary s;
    s.f1.assign(f1_scores.begin(), f1_scores.end());
    const auto q = stats::quartiles(f1_scores);
    s.q1 = q.q1;
    s.median = q.median;
    s.q3 = q.q3;
    const auto above = std::count_if(f1_scores.begin(), f1_scores.end(), [](double v) { return v > 0.8; });
    s.fraction_above_0_8 = static_cast<double>(above) / static_cast<double>(f1_scores.size());
    return s;
}

std::size_t select_method(std::span<const CohortSummary> summaries) {
    if (summaries.empty()) throw ArgumentError("select_method: no methods");
    std::size_t best = 0;
    for (std::size_t i = 1; i < summaries.size(); ++i) {
        const auto& a = summaries[i];
        const auto& b = summaries[best];
        if (a.median > b.median || (a.median == b.median && a.fraction_above_0_8 > b.fraction_above_0_8)) best = i;
    }
    return best;
}

MethodComparison compare_scores(std::span<const MethodScores> methods) {
    if (methods.empty()) throw ArgumentError("compare_scores: no methods");
    MethodComparison out;
    const auto& ref = methods.front().participants;
    if (ref.empty()) throw ArgumentError("compare_scores: no participants");
    for (const auto& p : ref) out.participants.push_back(p.participant_id);
    out.f1.assign(ref.size(), std::vector<double>(methods.size(), 0.0));
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto& ms = methods[m];
        out.methods.push_back(ms.method);
        if (ms.participants.size() != ref.size())
            throw ProtocolError("method '" + ms.method + "' was scored on a different participant set");
        std::vector<double> column;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const auto& p = ms.participants[i];
            if (p.participant_id != ref[i].participant_id || p.frame_set_digest != ref[i].frame_set_digest ||
                p.counts.total() != ref[i].counts.total())
                throw ProtocolError("method '" + ms.method + "' was scored on different frames for participant '" +
                                    ref[i].participant_id + "'");
            out.f1[i][m] = p.f1.value;
            column.push_back(p.f1.value);
        }
        out.summaries.push_back(summarize_cohort(column));
    }
    out.selected = select_method(out.summaries);
    return out;
}

std::vector<LabeledSample> labeled_samples(const Dataset& data) {
    // (participant, session) -> session index
    std::map<std::pair<std::string, std::string>, const Session*> sessions;
    for (const auto& s : data.sessions) sessions[{s.manifest.participant_id, s.manifest.session_id}] = &s;
    std::map<const Session*, std::unordered_map<std::int64_t, const DetectionRecord*>> by_frame;
    std::vector<LabeledSample> out;
    for (const auto& a : data.annotations) {
        auto it = sessions.find({a.participant_id, a.session_id});
        if (it == sessions.end()) continue;
        auto& frames = by_frame[it->second];
        if (frames.empty())
            for (const auto& d : it->second->detections)
                frames[d.frame_index * 2 + (d.hand_side == HandSide::Right ? 1 : 0)] = &d;
        auto hit = frames.find(a.frame_index * 2 + (a.hand_side == HandSide::Right ? 1 : 0));
        if (hit == frames.end()) continue;
        out.push_back({a.participant_id, featurize(*hit->second), a.label});
    }
    return out;
}

std::vector<MethodScores> score_methods(const Dataset& data, std::span<const Method> methods,
                                        const EvaluationConfig& cfg) {
    const auto participants = data.annotated_participants();
    if (participants.empty()) throw ArgumentError("no annotated participants to evaluate");

    std::vector<LabeledSample> samples;
    std::map<std::string, MlpModel> fold_models;
    const bool any_neural = std::any_of(methods.begin(), methods.end(), [](Method m) { return is_neural(m); });
    if (any_neural) {
        samples = labeled_samples(data);
        const auto split = make_loso(participants);
        if (auto check = verify_loso(split, participants); !check) throw SplitIntegrityError(check.reason);
        for (auto& fm : train(samples, split, cfg.training)) fold_models.emplace(fm.fold.held_out, std::move(fm.result.model));
    }

    std::vector<MethodScores> out;
    for (auto method : methods) {
        MethodScores ms{std::string(to_string(method)), {}};
        for (const auto& pid : participants) {
            const MlpModel* model = nullptr;
            if (is_neural(method)) model = &fold_models.at(pid);
            std::vector<InteractionProfile> profiles;
            for (const auto& s : data.sessions) {
                if (s.manifest.participant_id != pid) continue;
                auto sp = classify_session(s.detections, s.manifest, method, model, cfg.pooling);
                profiles.push_back(std::move(sp.left));
                profiles.push_back(std::move(sp.right));
            }
            ms.participants.push_back(score_participant(pid, profiles, data.annotations));
        }
        out.push_back(std::move(ms));
    }
    return out;
}

MethodComparison compare_methods(const Dataset& data, std::span<const Method> methods, const EvaluationConfig& cfg) {
    const auto scores = score_methods(data, methods, cfg);
    return compare_scores(scores);
}

}  // namespace handuse
