#include "handuse/pipeline.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include "handuse/error.hpp"
#include "handuse/eval.hpp"
#include "text.hpp"

namespace fs = std::filesystem;

namespace handuse {

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads; rethrows the first failure by index.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void write_file(const fs::path& path, const std::string& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << body;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw ConfigError(std::string("missing required option ") + flag);
}

std::optional<MlpModel> load_model_if_needed(const RunConfig& cfg, Method method) {
    if (!is_neural(method)) return std::nullopt;
    if (cfg.model.empty()) throw ConfigError("method '" + std::string(to_string(method)) + "' requires --model");
    return parse_model(read_file(cfg.model));
}

std::string profile_name(const std::string& manifest_path, HandSide side) {
    return fs::path(manifest_path).stem().string() + "." + std::string(to_string(side)) + ".rle";
}

ParticipantMeasures participant_from_sessions(const std::string& id, const std::vector<SessionMeasures>& sessions) {
    std::vector<HandUseMeasures> dom, nondom;
    for (const auto& s : sessions) {
        dom.push_back(s.dominant);
        nondom.push_back(s.nondominant);
    }
    ParticipantMeasures p{id, aggregate_participant(dom), aggregate_participant(nondom), {}};
    p.bilateral = bilateral(p.dominant, p.nondominant);
    return p;
}

std::string table_extension(Format f) { return f == Format::JsonLines ? ".jsonl" : ".csv"; }
Format table_format(Format f) { return f == Format::JsonLines ? Format::JsonLines : Format::Csv; }

}  // namespace

std::uint64_t content_hash(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Dataset load_dataset(const RunConfig& cfg) {
    require(cfg.manifests, "--manifests");
    require(cfg.detections, "--detections");
    const auto manifests = list_manifests(cfg.manifests);
    Dataset data;
    data.sessions.resize(manifests.size());
    parallel_for(manifests.size(), cfg.workers,
                 [&](std::size_t i) { data.sessions[i] = load_session(manifests[i], cfg.detections); });
    if (!cfg.annotations.empty()) data.annotations = parse_annotations(read_file(cfg.annotations));
    if (!cfg.clinical.empty()) data.clinical = parse_clinical(read_file(cfg.clinical));
    data.participant_profiles();  // validates consistent dominance
    return data;
}

SessionProfiles session_profiles(const Session& session, Method method, const MlpModel* model,
                                 const PoolingConfig& pooling) {
    return classify_session(session.detections, session.manifest, method, model, pooling);
}

std::vector<ParticipantMeasures> cohort_measures(const Dataset& data, Method method, const MlpModel* model,
                                                 const PoolingConfig& pooling) {
    const auto profiles = data.participant_profiles();
    std::map<std::string, std::vector<SessionMeasures>> per_participant;
    for (const auto& s : data.sessions) {
        const auto sp = session_profiles(s, method, model, pooling);
        per_participant[s.manifest.participant_id].push_back(
            compute_session_measures(sp.left, sp.right, profiles.at(s.manifest.participant_id)));
    }
    std::vector<ParticipantMeasures> out;
    for (const auto& id : data.participants()) out.push_back(participant_from_sessions(id, per_participant.at(id)));
    return out;
}

std::vector<ParticipantMeasures> measures_from_profiles(const std::string& profiles_dir,
                                                        const std::string& manifests,
                                                        const std::function<void(const std::string&)>& warn) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<SessionMeasures>> per_participant;
    std::map<std::string, bool> incomplete;
    std::map<std::string, ParticipantProfile> dominance;
    for (const auto& path : list_manifests(manifests)) {
        const auto manifest = parse_manifest(read_file(path));
        const auto& id = manifest.participant_id;
        if (!dominance.count(id)) order.push_back(id);
        auto [it, inserted] = dominance.try_emplace(id, participant_profile(manifest));
        if (!inserted && !(it->second == participant_profile(manifest)))
            throw ValidationError("dominant_side_post_injury", "sessions of '" + id + "' disagree on hand dominance");
        if (incomplete[id]) continue;
        const auto left_path = fs::path(profiles_dir) / profile_name(path, HandSide::Left);
        const auto right_path = fs::path(profiles_dir) / profile_name(path, HandSide::Right);
        if (!fs::exists(left_path) || !fs::exists(right_path)) {
            warn("no profile for participant '" + id + "' session '" + manifest.session_id + "'; participant skipped");
            incomplete[id] = true;
            continue;
        }
        const auto left = parse_profile(read_file(left_path.string()));
        const auto right = parse_profile(read_file(right_path.string()));
        if (left.bits.size() != static_cast<std::size_t>(manifest.frame_count) || right.bits.size() != left.bits.size())
            throw RangeError("profile length does not match manifest for '" + path + "'");
        per_participant[id].push_back(compute_session_measures(left, right, it->second));
    }
    std::vector<ParticipantMeasures> out;
    for (const auto& id : order)
        if (!incomplete[id]) out.push_back(participant_from_sessions(id, per_participant.at(id)));
    return out;
}

void cmd_profile(const RunConfig& cfg, std::ostream& log) {
    require(cfg.out, "--out");
    require(cfg.detections, "--detections");
    require(cfg.manifests, "--manifests");
    if (cfg.methods.size() != 1) throw ConfigError("profile takes exactly one --method");
    const Method method = cfg.methods.front();
    const auto model = load_model_if_needed(cfg, method);
    const std::string model_bytes = is_neural(method) ? read_file(cfg.model) : std::string();

    const auto manifests = list_manifests(cfg.manifests);
    struct Job {
        std::string hash;
        bool cached = false;
        std::optional<SessionProfiles> profiles;
    };
    std::vector<Job> jobs(manifests.size());
    parallel_for(manifests.size(), cfg.workers, [&](std::size_t i) {
        auto& job = jobs[i];
        const auto det_path = detections_path_for(manifests[i], cfg.detections);
        std::uint64_t h = content_hash(read_file(manifests[i]));
        h = content_hash(read_file(det_path), h);
        h = content_hash(std::string(to_string(method)) + "|" + std::to_string(cfg.pooling.window) + "|" +
                             (cfg.pooling.tie_policy == TiePolicy::OneOnTie ? "one" : "zero") + "|",
                         h);
        h = content_hash(model_bytes, h);
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        job.hash = buf;

        bool cached = true;
        for (auto side : {HandSide::Left, HandSide::Right}) {
            const auto path = fs::path(cfg.out) / profile_name(manifests[i], side);
            if (!fs::exists(path) || profile_input_hash(read_file(path.string())) != job.hash) cached = false;
        }
        job.cached = cached;
        if (cached) return;
        const auto session = load_session(manifests[i], cfg.detections);
        job.profiles = session_profiles(session, method, model ? &*model : nullptr, cfg.pooling);
    });

    std::size_t written = 0, reused = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].cached) {
            ++reused;
            continue;
        }
        for (auto side : {HandSide::Left, HandSide::Right})
            write_file(fs::path(cfg.out) / profile_name(manifests[i], side),
                       serialize_profile(jobs[i].profiles->for_side(side), jobs[i].hash));
        ++written;
    }
    log << "profile: " << written << " session(s) written, " << reused << " reused from cache\n";
}

void cmd_measures(const RunConfig& cfg, std::ostream& log) {
    require(cfg.out, "--out");
    require(cfg.manifests, "--manifests");
    std::vector<ParticipantMeasures> rows;
    if (!cfg.profiles.empty()) {
        rows = measures_from_profiles(cfg.profiles, cfg.manifests,
                                      [&](const std::string& msg) { log << "warning: " << msg << '\n'; });
    } else {
        if (cfg.methods.size() != 1) throw ConfigError("measures takes exactly one --method");
        const auto model = load_model_if_needed(cfg, cfg.methods.front());
        rows = cohort_measures(load_dataset(cfg), cfg.methods.front(), model ? &*model : nullptr, cfg.pooling);
    }
    const auto path = fs::path(cfg.out) / "measures.csv";
    write_file(path, serialize_measures_table(rows));
    log << "measures: " << rows.size() << " participant(s) -> " << path.string() << '\n';
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
    require(cfg.out, "--out");
    require(cfg.annotations, "--annotations");
    const auto data = load_dataset(cfg);
    const auto samples = labeled_samples(data);
    if (samples.empty()) throw InputError("no annotated detections to train on");
    const auto result = train_model(samples, cfg.training);
    for (const auto& w : result.warnings) log << "warning: " << w << '\n';
    const auto path = fs::path(cfg.out) / "model.json";
    write_file(path, serialize_model(result.model, cfg.training));
    log << "train: " << samples.size() << " samples, " << result.epochs_run << " epoch(s), best epoch "
        << result.best_epoch << ", validation loss " << text::sig6(result.best_validation_loss) << " -> "
        << path.string() << '\n';
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
    require(cfg.out, "--out");
    require(cfg.annotations, "--annotations");
    if (cfg.methods.empty()) throw ConfigError("evaluate needs at least one --method");
    const auto data = load_dataset(cfg);
    const auto comparison = compare_methods(data, cfg.methods, {cfg.pooling, cfg.training});
    const auto fmt = table_format(cfg.format);
    const auto ext = table_extension(cfg.format);
    const fs::path out(cfg.out);
    write_file(out / ("f1_per_participant" + ext), emit(f1_table(comparison), fmt));
    write_file(out / ("method_summary" + ext), emit(method_summary_table(comparison), fmt));
    if (comparison.methods.size() >= 2 && comparison.participants.size() >= 2) {
        const auto posthoc = stats::dunn_sidak(comparison.f1);
        write_file(out / ("friedman" + ext), emit(friedman_table(posthoc, comparison.methods), fmt));
        write_file(out / ("posthoc" + ext), emit(posthoc_table(posthoc, comparison.methods), fmt));
        if (!posthoc.omnibus_significant)
            log << "evaluate: Friedman test not significant; post-hoc comparisons are informational\n";
    } else {
        log << "evaluate: Friedman test skipped (needs >= 2 methods and >= 2 participants)\n";
    }
    const auto& best = comparison.summaries[comparison.selected];
    log << "evaluate: selected " << comparison.methods[comparison.selected] << " (median F1 " << text::sig6(best.median)
        << ", fraction > 0.8 " << text::sig6(best.fraction_above_0_8) << ")\n";
}

void cmd_correlate(const RunConfig& cfg, std::ostream& log) {
    require(cfg.out, "--out");
    require(cfg.clinical, "--clinical");
    std::vector<ParticipantMeasures> measures;
    if (!cfg.measures.empty()) {
        measures = parse_measures_table(read_file(cfg.measures));
    } else {
        if (cfg.methods.size() != 1) throw ConfigError("correlate takes exactly one --method");
        const auto model = load_model_if_needed(cfg, cfg.methods.front());
        auto local = cfg;
        local.clinical.clear();
        measures = cohort_measures(load_dataset(local), cfg.methods.front(), model ? &*model : nullptr, cfg.pooling);
    }
    const auto clinical = parse_clinical(read_file(cfg.clinical));
    const fs::path out(cfg.out);
    for (auto block : kAllBlocks) {
        const auto m = correlate_block(measures, clinical, block);
        write_file(out / ("correlation_" + std::string(to_string(block)) + std::string(file_extension(cfg.format))),
                   emit(m, cfg.format));
    }
    const auto dominance = dominance_comparison(measures);
    for (const auto& row : dominance)
        if (!row.error.empty()) log << "warning: " << row.measure << ": " << row.error << '\n';
    write_file(out / ("dominance" + table_extension(cfg.format)), emit(dominance_table(dominance), table_format(cfg.format)));
    log << "correlate: " << measures.size() << " participant(s), " << std::size(kAllBlocks) << " blocks -> "
        << out.string() << '\n';
}

void cmd_synth(const RunConfig& cfg, std::ostream& log) {
    require(cfg.out, "--out");
    const auto cohort = synthesize(cfg.synth);
    write_cohort(cohort, cfg.out);
    log << "synth: " << cohort.sessions.size() << " session(s) for " << cohort.truth.size() << " participant(s) -> "
        << cfg.out << '\n';
}

int run_guarded(const std::function<void()>& fn, std::ostream& err) {
    try {
        fn();
        return 0;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace handuse
