#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "handuse/classify.hpp"
#include "handuse/dataset.hpp"
#include "handuse/loso.hpp"
#include "handuse/neural.hpp"
#include "handuse/stats.hpp"

namespace handuse {

/// Positive class = interaction.
struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::uint64_t total() const { return tp + fp + fn + tn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    bool operator==(const ConfusionCounts&) const = default;
};

struct F1Score {
    double value = 0;
    /// 2tp + fp + fn == 0: nothing positive was predicted or labelled; value is 0.
    bool degenerate = false;
};

F1Score f1(const ConfusionCounts& counts);

struct ParticipantScore {
    std::string participant_id;
    ConfusionCounts counts;
    F1Score f1;
    /// Order-independent digest of the (session, frame, hand) pairs that were scored.
    std::uint64_t frame_set_digest = 0;
};

/// Scores `participant_id`'s annotated frames (both hands pooled) against predicted profiles.
/// Annotations of other participants are ignored. Throws RangeError for an annotation past
/// the end of its profile and ArgumentError when no profile covers an annotated session/hand.
ParticipantScore score_participant(const std::string& participant_id, std::span<const InteractionProfile> predictions,
                                   std::span<const AnnotationRecord> annotations);

struct CohortSummary {
    std::vector<double> f1;
    double median = 0;
    double q1 = 0;
    double q3 = 0;
    /// Share of participants with F1 strictly above 0.8.
    double fraction_above_0_8 = 0;
};

CohortSummary summarize_cohort(std::span<const double> f1_scores);

struct MethodScores {
    std::string method;
    std::vector<ParticipantScore> participants;  // same order for every method
};

struct MethodComparison {
    std::vector<std::string> methods;
    std::vector<std::string> participants;
    /// participants x methods, the layout a Friedman test expects.
    stats::ScoreMatrix f1;
    std::vector<CohortSummary> summaries;
    std::size_t selected = 0;
};

/// Highest median F1, then highest fraction above 0.8, then first listed.
std::size_t select_method(std::span<const CohortSummary> summaries);

/// Builds the comparison from already-scored methods. Throws ProtocolError when methods
/// were scored on different participants or frame sets.
MethodComparison compare_scores(std::span<const MethodScores> methods);

struct EvaluationConfig {
    PoolingConfig pooling;
    TrainConfig training;
};

/// Annotated detections as training samples: every annotation with a detection for
/// the same (session, frame, hand).
std::vector<LabeledSample> labeled_samples(const Dataset& data);

/// Runs each method over the annotated participants and compares them. Neural methods
/// are trained leave-one-subject-out: each participant is predicted by the model whose
/// training excluded them.
MethodComparison compare_methods(const Dataset& data, std::span<const Method> methods, const EvaluationConfig& cfg);

/// Per-participant predictions of one method; neural methods train under LOSO.
std::vector<MethodScores> score_methods(const Dataset& data, std::span<const Method> methods,
                                        const EvaluationConfig& cfg);

}  // namespace handuse
