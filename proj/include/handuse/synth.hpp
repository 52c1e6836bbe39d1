#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "handuse/classify.hpp"
#include "handuse/ingest.hpp"
#include "handuse/measures.hpp"

namespace handuse {

struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t participants = 8;
    std::size_t sessions_per_participant = 2;
    double session_minutes = 2.0;
    double fps = 30.0;
    /// Planted per-hand ranges; each participant draws uniformly inside them.
    double perc_min = 0.2, perc_max = 0.85;
    double num_min = 60.0, num_max = 180.0;  // events per hour
    /// Probability that an annotation label is flipped. Detections are never perturbed.
    double label_noise = 0.0;
    /// Standard deviation of additive noise on clinical scores, as a fraction of each score's range.
    double clinical_noise = 0.0;
    /// Participants that receive frame-level annotations (the first N); 0 means all.
    std::size_t annotated_participants = 0;
    /// Probability of a lower-confidence duplicate detection for a detected hand.
    double duplicate_rate = 0.05;
    /// Probability that a non-interacting hand is detected at all (with a non-object contact state).
    double idle_detection_rate = 0.7;
};

struct SynthSession {
    SessionManifest manifest;
    std::vector<DetectionRecord> detections;  // raw, may contain duplicates
    InteractionProfile left;                  // planted ground truth
    InteractionProfile right;
    const InteractionProfile& for_side(HandSide side) const { return side == HandSide::Left ? left : right; }
};

/// Exact ground truth derived from the planted profiles' integer counts.
struct TruthRow {
    std::string participant_id;
    HandSide dominant_side = HandSide::Right;
    std::int64_t dominant_active_frames = 0, nondominant_active_frames = 0;
    std::int64_t dominant_events = 0, nondominant_events = 0;
    std::int64_t total_frames = 0;
    ParticipantMeasures measures;
};

struct SynthCohort {
    SynthConfig config;
    std::vector<SynthSession> sessions;
    std::vector<AnnotationRecord> annotations;
    std::vector<ClinicalRecord> clinical;
    std::vector<TruthRow> truth;
};

/// Deterministic for a given config. Throws ArgumentError for infeasible targets
/// (e.g. a perc range outside [0,1] or more events than a session can hold).
SynthCohort synthesize(const SynthConfig& cfg);

/// Planted profile with exactly `active` one-frames split into exactly `events` runs.
std::vector<std::uint8_t> plant_profile(std::int64_t frames, std::int64_t active, std::int64_t events,
                                        std::uint64_t seed);

/// Writes detections/<pid>_<sid>.det, manifests/<pid>_<sid>.manifest, annotations.csv,
/// clinical.csv and truth.csv under `dir`.
void write_cohort(const SynthCohort& cohort, const std::string& dir);

std::string serialize_truth(const std::vector<TruthRow>& truth);

}  // namespace handuse
