// Command-line entry point: handuse <synth|profile|measures|train|evaluate|correlate> [options]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "handuse/error.hpp"
#include "handuse/pipeline.hpp"

namespace {

using handuse::RunConfig;

struct Flags {
    std::vector<std::string> methods;
    std::string tie_policy = "zero";
    std::string format = "csv";
};

void add_inputs(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--detections", cfg.detections, "Directory of <stem>.det detection files");
    cmd->add_option("--manifests", cfg.manifests, "Directory of <stem>.manifest files, or a single manifest");
}

void add_method(CLI::App* cmd, RunConfig& cfg, Flags& flags, std::vector<std::string> defaults, bool model_flag) {
    flags.methods = std::move(defaults);
    cmd->add_option("--method", flags.methods, "state-frame, state-pool, ann or ann-pool (repeatable)")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--window", cfg.pooling.window, "Pooling window in frames")->capture_default_str();
    cmd->add_option("--tie-policy", flags.tie_policy, "Pooling tie resolution: zero or one")->capture_default_str();
    if (model_flag) cmd->add_option("--model", cfg.model, "Model checkpoint for the ann methods");
}

void add_training(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--learning-rate", cfg.training.learning_rate)->capture_default_str();
    cmd->add_option("--batch-size", cfg.training.batch_size)->capture_default_str();
    cmd->add_option("--epochs", cfg.training.max_epochs)->capture_default_str();
    cmd->add_option("--patience", cfg.training.patience)->capture_default_str();
}

void finish(RunConfig& cfg, const Flags& flags) {
    cfg.methods.clear();
    for (const auto& m : flags.methods) cfg.methods.push_back(handuse::parse_method(m));
    if (flags.tie_policy == "zero")
        cfg.pooling.tie_policy = handuse::TiePolicy::ZeroOnTie;
    else if (flags.tie_policy == "one")
        cfg.pooling.tie_policy = handuse::TiePolicy::OneOnTie;
    else
        throw handuse::ConfigError("--tie-policy must be 'zero' or 'one'");
    if (cfg.pooling.window < 1) throw handuse::ConfigError("--window must be >= 1");
    cfg.format = handuse::parse_format(flags.format);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hand-use outcome measures from egocentric hand detections"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    Flags flags;
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Seed for every random generator")->capture_default_str();
    app.add_option("--out", cfg.out, "Output directory");
    app.add_option("--format", flags.format, "csv, json-lines or heatmap-data")->capture_default_str();
    app.add_option("--workers", cfg.workers, "Worker threads for session parsing")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort with known ground truth");
    synth->add_option("--participants", cfg.synth.participants)->capture_default_str();
    synth->add_option("--sessions", cfg.synth.sessions_per_participant)->capture_default_str();
    synth->add_option("--minutes", cfg.synth.session_minutes, "Session length")->capture_default_str();
    synth->add_option("--fps", cfg.synth.fps)->capture_default_str();
    synth->add_option("--perc-min", cfg.synth.perc_min)->capture_default_str();
    synth->add_option("--perc-max", cfg.synth.perc_max)->capture_default_str();
    synth->add_option("--num-min", cfg.synth.num_min)->capture_default_str();
    synth->add_option("--num-max", cfg.synth.num_max)->capture_default_str();
    synth->add_option("--label-noise", cfg.synth.label_noise, "Annotation flip probability")->capture_default_str();
    synth->add_option("--clinical-noise", cfg.synth.clinical_noise)->capture_default_str();
    synth->add_option("--annotated", cfg.synth.annotated_participants, "Annotated participants (0 = all)")
        ->capture_default_str();

    auto* profile = app.add_subcommand("profile", "Write per-hand interaction profiles");
    add_inputs(profile, cfg);
    add_method(profile, cfg, flags, {"state-pool"}, true);

    auto* measures = app.add_subcommand("measures", "Per-participant Perc/Dur/Num table");
    add_inputs(measures, cfg);
    add_method(measures, cfg, flags, {"state-pool"}, true);
    measures->add_option("--profiles", cfg.profiles, "Use cached profiles from this directory");

    auto* train = app.add_subcommand("train", "Train the interaction classifier on all annotated participants");
    add_inputs(train, cfg);
    train->add_option("--annotations", cfg.annotations)->required();
    add_training(train, cfg);

    auto* evaluate = app.add_subcommand("evaluate", "Compare classifiers against annotations");
    add_inputs(evaluate, cfg);
    add_method(evaluate, cfg, flags, {"state-frame", "state-pool", "ann", "ann-pool"}, false);
    evaluate->add_option("--annotations", cfg.annotations)->required();
    add_training(evaluate, cfg);

    auto* correlate = app.add_subcommand("correlate", "Correlate measures with clinical scores");
    add_inputs(correlate, cfg);
    add_method(correlate, cfg, flags, {"state-pool"}, true);
    correlate->add_option("--measures", cfg.measures, "Measures table from the measures command");
    correlate->add_option("--clinical", cfg.clinical)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    return handuse::run_guarded(
        [&] {
            finish(cfg, flags);
            cfg.training.seed = seed;
            cfg.synth.seed = seed;
            if (synth->parsed()) handuse::cmd_synth(cfg, std::cerr);
            if (profile->parsed()) handuse::cmd_profile(cfg, std::cerr);
            if (measures->parsed()) handuse::cmd_measures(cfg, std::cerr);
            if (train->parsed()) handuse::cmd_train(cfg, std::cerr);
            if (evaluate->parsed()) handuse::cmd_evaluate(cfg, std::cerr);
            if (correlate->parsed()) handuse::cmd_correlate(cfg, std::cerr);
        },
        std::cerr);
}
