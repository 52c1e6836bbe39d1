#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "handuse/classify.hpp"
#include "handuse/dataset.hpp"
#include "handuse/measures.hpp"
#include "handuse/neural.hpp"
#include "handuse/report.hpp"
#include "handuse/synth.hpp"

namespace handuse {

struct RunConfig {
    std::string detections;   // directory of <stem>.det files
    std::string manifests;    // directory of <stem>.manifest files, or one manifest
    std::string annotations;  // annotations CSV
    std::string clinical;     // clinical scores CSV
    std::string profiles;     // directory of cached <stem>.<L|R>.rle profiles
    std::string measures;     // measures table produced by `measures`
    std::string model;        // checkpoint for the neural methods
    std::vector<Method> methods{Method::StatePool};
    PoolingConfig pooling;
    TrainConfig training;
    SynthConfig synth;
    std::string out;
    Format format = Format::Csv;
    std::size_t workers = 1;
};

/// Loads every session named by cfg.manifests plus optional annotations and clinical scores.
/// Sessions are parsed by up to cfg.workers threads; order follows the manifest listing.
Dataset load_dataset(const RunConfig& cfg);

/// Profiles for one session under one method (the one-shot internal path).
SessionProfiles session_profiles(const Session& session, Method method, const MlpModel* model,
                                 const PoolingConfig& pooling);

/// Duration-weighted participant measures from classified sessions, in participant order.
std::vector<ParticipantMeasures> cohort_measures(const Dataset& data, Method method, const MlpModel* model,
                                                 const PoolingConfig& pooling);

/// Same measures from cached profile files. Participants with a missing profile are skipped
/// and reported through `warn`.
std::vector<ParticipantMeasures> measures_from_profiles(const std::string& profiles_dir,
                                                        const std::string& manifests,
                                                        const std::function<void(const std::string&)>& warn);

/// 64-bit FNV-1a, used to key cached profiles by their inputs.
std::uint64_t content_hash(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Commands. Each writes its outputs under cfg.out and progress/warnings to `log`.
void cmd_profile(const RunConfig& cfg, std::ostream& log);
void cmd_measures(const RunConfig& cfg, std::ostream& log);
void cmd_train(const RunConfig& cfg, std::ostream& log);
void cmd_evaluate(const RunConfig& cfg, std::ostream& log);
void cmd_correlate(const RunConfig& cfg, std::ostream& log);
void cmd_synth(const RunConfig& cfg, std::ostream& log);

/// Runs `fn` and maps failures onto exit codes: 0 ok, 1 runtime failure, 2 invalid input or config.
int run_guarded(const std::function<void()>& fn, std::ostream& err);

}  // namespace handuse
