// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "handuse/classify.hpp"
#include "handuse/error.hpp"
#include "handuse/eval.hpp"
#include "handuse/loso.hpp"
#include "handuse/measures.hpp"
#include "handuse/pipeline.hpp"
#include "handuse/report.hpp"
#include "handuse/stats.hpp"
#include "handuse/synth.hpp"
#include "oracles.hpp"

using namespace handuse;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("handuse_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

InteractionProfile random_profile(std::mt19937_64& rng, std::size_t length, double fps) {
    InteractionProfile p;
    p.participant_id = "R";
    p.session_id = "S";
    p.fps = fps;
    p.bits.resize(length);
    // Either i.i.d. bits or long runs.
    const double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const bool runs = rng() % 2 == 0;
    std::bernoulli_distribution flip(runs ? 0.02 : density);
    std::uint8_t state = 0;
    for (auto& b : p.bits) {
        if (runs) {
            if (flip(rng)) state ^= 1;
            b = state;
        } else {
            b = flip(rng);
        }
    }
    return p;
}

/// Shared corpus for the pooling and event criteria: lengths 1..5000 including every
/// residue modulo the window.
std::vector<InteractionProfile> corpus() {
    std::mt19937_64 rng(2024);
    std::vector<InteractionProfile> out;
    for (std::size_t i = 0; i < 1200; ++i) {
        std::size_t len = i < 60 ? i + 1 : 1 + rng() % 5000;
        if (i >= 60 && i < 120) len = 5000 - (i - 60);
        out.push_back(random_profile(rng, len, 30.0));
    }
    return out;
}

// 1. Measure identity.
Outcome measure_identity() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(7);
    const double fps_choices[] = {15.0, 25.0, 29.97, 30.0, 60.0};
    double worst = 0;
    std::size_t with_events = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto p = random_profile(rng, 1 + rng() % 20000, fps_choices[rng() % 5]);
        const auto m = compute_measures(p);
        if (m.event_count == 0) continue;
        ++with_events;
        worst = std::max(worst, std::abs(m.perc - m.num_per_hour * m.dur_s / 3600.0));
    }
    const double elapsed = seconds_since(t0);
    return {with_events >= 1000 && worst < 1e-12 && elapsed < 5.0,
            fmt("max |perc - num*dur/3600| = %.3g over %zu profiles with events, %.2f s", worst, with_events, elapsed)};
}

// 2. Pooling.
Outcome pooling(const std::vector<InteractionProfile>& profiles) {
    std::size_t mismatches = 0, not_idempotent = 0, ragged = 0;
    for (const auto& p : profiles) {
        if (p.bits.size() % 30 != 0) ++ragged;
        for (auto policy : {TiePolicy::ZeroOnTie, TiePolicy::OneOnTie}) {
            const PoolingConfig cfg{30, policy};
            const auto pooled = pool_majority(p, cfg);
            if (pooled.bits != oracle::pool(p.bits, 30, policy == TiePolicy::OneOnTie)) ++mismatches;
            if (pool_majority(pooled, cfg).bits != pooled.bits) ++not_idempotent;
        }
    }
    return {mismatches == 0 && not_idempotent == 0 && profiles.size() >= 1000,
            fmt("%zu sequences (%zu ragged), %zu oracle mismatches, %zu idempotence failures", profiles.size(), ragged,
                mismatches, not_idempotent)};
}

// 3. Event extraction.
Outcome events(const std::vector<InteractionProfile>& profiles) {
    std::size_t bad = 0, total_events = 0;
    for (const auto& p : profiles) {
        const auto ev = extract_events(p);
        total_events += ev.size();
        // Events plus the zero-filled complement must rebuild the profile.
        std::vector<std::uint8_t> rebuilt(p.bits.size(), 0);
        std::int64_t ones_in_events = 0, last_end = -1;
        bool ok = true;
        for (const auto& e : ev) {
            ok &= e.start_frame > last_end && e.end_frame > e.start_frame;  // disjoint, non-adjacent, non-empty
            last_end = e.end_frame;
            ones_in_events += e.end_frame - e.start_frame;
            for (auto f = e.start_frame; f < e.end_frame; ++f) rebuilt[static_cast<std::size_t>(f)] = 1;
        }
        std::int64_t popcount = 0;
        for (auto b : p.bits) popcount += b;
        const auto runs = oracle::runs_of_ones(p.bits);
        ok &= rebuilt == p.bits && ones_in_events == popcount && runs.size() == ev.size();
        if (!ok) ++bad;
    }
    return {bad == 0, fmt("%zu profiles, %zu events, %zu reconstruction failures", profiles.size(), total_events, bad)};
}

// 4. End-to-end construction.
Outcome end_to_end() {
    const auto t0 = Clock::now();
    const auto dir = scratch("e2e");
    std::ostringstream log;

    RunConfig cfg;
    cfg.synth.seed = 101;
    cfg.synth.participants = 8;
    cfg.synth.sessions_per_participant = 2;
    cfg.synth.session_minutes = 2.0;
    cfg.out = (dir / "clean").string();
    cmd_synth(cfg, log);
    cfg.detections = (dir / "clean/detections").string();
    cfg.manifests = (dir / "clean/manifests").string();
    const auto data = load_dataset(cfg);
    const auto measured = cohort_measures(data, Method::StateFrame, nullptr, cfg.pooling);

    // Truth is regenerated from the config and checked against the written truth file.
    const auto truth_cohort = synthesize(cfg.synth);
    std::size_t count_mismatch = 0;
    double worst_rel = 0;
    auto rel = [](double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
    if (measured.size() != truth_cohort.truth.size()) return {false, "participant count differs from truth"};
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const auto& t = truth_cohort.truth[i];
        const auto& m = measured[i];
        const double fps = cfg.synth.fps;
        count_mismatch += m.participant_id != t.participant_id;
        count_mismatch += m.dominant.event_count != t.dominant_events;
        count_mismatch += m.nondominant.event_count != t.nondominant_events;
        count_mismatch += std::llround(m.dominant.interaction_time_s * fps) != t.dominant_active_frames;
        count_mismatch += std::llround(m.nondominant.interaction_time_s * fps) != t.nondominant_active_frames;
        count_mismatch += std::llround(m.dominant.total_time_s * fps) != t.total_frames;
        for (auto [a, b] : {std::pair{m.dominant.perc, t.measures.dominant.perc},
                            {m.dominant.dur_s, t.measures.dominant.dur_s},
                            {m.dominant.num_per_hour, t.measures.dominant.num_per_hour},
                            {m.nondominant.perc, t.measures.nondominant.perc},
                            {m.nondominant.dur_s, t.measures.nondominant.dur_s},
                            {m.nondominant.num_per_hour, t.measures.nondominant.num_per_hour}})
            worst_rel = std::max(worst_rel, rel(a, b));
    }
    const bool truth_file_matches = slurp(dir / "clean/truth.csv") == serialize_truth(truth_cohort.truth);

    // Label noise on annotations only: State_frame reproduces the planted profile, so each
    // frame is TP with prob pi(1-e), FP with prob pi*e and FN with prob (1-pi)*e.
    const double eps = 0.1;
    cfg.synth.label_noise = eps;
    cfg.synth.seed = 202;
    cfg.out = (dir / "noisy").string();
    cmd_synth(cfg, log);
    RunConfig noisy = cfg;
    noisy.detections = (dir / "noisy/detections").string();
    noisy.manifests = (dir / "noisy/manifests").string();
    noisy.annotations = (dir / "noisy/annotations.csv").string();
    const auto noisy_data = load_dataset(noisy);
    const auto noisy_truth = synthesize(cfg.synth).truth;
    const Method methods[] = {Method::StateFrame};
    const auto scores = score_methods(noisy_data, methods, {});
    double worst_gap = 0;
    for (const auto& s : scores[0].participants) {
        const auto it = std::find_if(noisy_truth.begin(), noisy_truth.end(),
                                     [&](const TruthRow& t) { return t.participant_id == s.participant_id; });
        const double pi = static_cast<double>(it->dominant_active_frames + it->nondominant_active_frames) /
                          (2.0 * static_cast<double>(it->total_frames));
        const double expected = 2 * pi * (1 - eps) / (2 * pi * (1 - eps) + eps);
        worst_gap = std::max(worst_gap, std::abs(s.f1.value - expected));
    }
    const double elapsed = seconds_since(t0);
    const bool pass = count_mismatch == 0 && worst_rel <= 1e-12 && truth_file_matches && worst_gap <= 0.03 &&
                      scores[0].participants.size() == 8 && elapsed < 30.0;
    return {pass, fmt("%zu count mismatches, max relative measure error %.3g, truth file %s; "
                      "noisy-label F1 max |F1 - expected| = %.4f over %zu participants; %.2f s",
                      count_mismatch, worst_rel, truth_file_matches ? "identical" : "DIFFERS", worst_gap,
                      scores[0].participants.size(), elapsed)};
}

// 5. Statistics oracles.
Outcome statistics() {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0, 1);

    double wilcoxon_gap = 0;
    std::vector<int> sizes_seen(13, 0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t) % 12;
        std::vector<double> x(n), y(n);
        bool any = false;
        while (!any) {
            for (std::size_t i = 0; i < n; ++i) {
                // One decimal place: ties and zero differences occur.
                x[i] = std::round(u(rng) * 30) / 10;
                y[i] = std::round(u(rng) * 30) / 10;
                any |= x[i] != y[i];
            }
        }
        ++sizes_seen[n];
        wilcoxon_gap = std::max(wilcoxon_gap,
                                std::abs(stats::wilcoxon_signed_rank(x, y).p - oracle::wilcoxon_enumerated_p(x, y)));
    }

    double spearman_gap = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 3 + rng() % 40;
        std::vector<double> x(n), y(n);
        for (;;) {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = static_cast<double>(rng() % 8);
                y[i] = t % 2 ? u(rng) : static_cast<double>(rng() % 5);
            }
            const bool vx = std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end();
            const bool vy = std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) != y.end();
            if (vx && vy) break;
        }
        spearman_gap = std::max(spearman_gap, std::abs(stats::spearman(x, y).rho - oracle::spearman_rho(x, y)));
    }

    double friedman_gap = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng() % 9, k = 2 + rng() % 5;
        stats::ScoreMatrix m(n, std::vector<double>(k));
        for (;;) {
            bool varied = false;
            for (auto& row : m) {
                for (auto& v : row) v = t % 3 ? static_cast<double>(rng() % 4) : u(rng);
                varied |= std::adjacent_find(row.begin(), row.end(), std::not_equal_to<>()) != row.end();
            }
            if (varied) break;
        }
        friedman_gap = std::max(friedman_gap, std::abs(stats::friedman(m).statistic - oracle::friedman_statistic(m)));
    }

    double sidak_gap = 0;
    for (double p = 1e-8; p < 1; p = p * 1.7 + 1e-4)
        for (std::size_t m = 1; m <= 45; ++m)
            sidak_gap = std::max(sidak_gap,
                                 std::abs(stats::sidak_adjust(p, m) - (1 - std::pow(1 - p, static_cast<double>(m)))));

    double sf_gap = 0;
    for (double z = -5; z <= 8.0001; z += 0.25) sf_gap = std::max(sf_gap, std::abs(stats::normal_sf(z) - oracle::normal_sf(z)));
    for (double df : {1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0})
        for (double x : {0.25, 0.5, 1.0, 2.0, 4.0, 7.5, 12.0, 20.0, 35.0, 50.0})
            sf_gap = std::max(sf_gap, std::abs(stats::chi2_sf(x, df) - oracle::chi2_sf(x, df)));

    const bool all_sizes = std::all_of(sizes_seen.begin() + 1, sizes_seen.end(), [](int c) { return c > 0; });
    const bool pass = wilcoxon_gap <= 0.01 && all_sizes && spearman_gap <= 1e-12 && friedman_gap <= 1e-10 &&
                      sidak_gap <= 1e-12 && sf_gap <= 1e-10;
    return {pass, fmt("wilcoxon |p - exact| %.3g (n = 1..12), spearman %.3g, friedman %.3g, sidak %.3g, "
                      "survival functions %.3g",
                      wilcoxon_gap, spearman_gap, friedman_gap, sidak_gap, sf_gap)};
}

// 6. Neural numerics.
Outcome neural() {
    std::mt19937_64 rng(31);
    double worst_grad = 0;
    for (int t = 0; t < 100; ++t)
        worst_grad = std::max(worst_grad, oracle::max_relative_gradient_error(oracle::draw_gradient_case(rng, 1e-3)));

    const auto t0 = Clock::now();
    SynthConfig sc;
    sc.seed = 77;
    sc.participants = 5;
    sc.sessions_per_participant = 2;
    sc.session_minutes = 2.0;
    const auto cohort = synthesize(sc);
    Dataset data;
    for (const auto& s : cohort.sessions) data.sessions.push_back({s.manifest, dedupe_per_frame(s.detections)});
    data.annotations = cohort.annotations;
    const auto samples = labeled_samples(data);
    const auto ids = data.annotated_participants();
    const auto split = make_loso(ids);
    TrainConfig cfg;
    cfg.seed = 5;
    const auto folds = train(samples, split, cfg);
    const double train_seconds = seconds_since(t0);

    double min_acc = 1;
    for (const auto& f : folds) {
        std::size_t n = 0, correct = 0;
        for (const auto& s : samples) {
            if (s.participant_id != f.fold.held_out) continue;
            const auto p = forward(f.result.model, s.features);
            correct += static_cast<std::uint8_t>(p[1] > p[0]) == s.label;
            ++n;
        }
        min_acc = std::min(min_acc, n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0);
    }

    const auto again = train(samples, split, cfg);
    bool reproducible = again.size() == folds.size();
    for (std::size_t i = 0; reproducible && i < folds.size(); ++i)
        reproducible = folds[i].result.model.flatten() == again[i].result.model.flatten() &&
                       folds[i].result.training_loss == again[i].result.training_loss;

    const bool pass = worst_grad < 1e-4 && reproducible && min_acc >= 0.95 && train_seconds < 60.0;
    return {pass, fmt("max gradient relative error %.3g over 100 draws; reproducible %s; min held-out accuracy %.4f "
                      "over %zu folds (%zu samples); LOSO training %.2f s",
                      worst_grad, reproducible ? "bitwise" : "NO", min_acc, folds.size(), samples.size(),
                      train_seconds)};
}

// 7. Protocol integrity.
Outcome protocol() {
    std::size_t generated = 0, rejected_good = 0, accepted_bad = 0;
    for (std::size_t n = 2; n <= 25; ++n) {
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back("P" + std::to_string(i));
        const auto split = make_loso(ids);
        ++generated;
        if (!verify_loso(split, ids)) ++rejected_good;
        for (std::size_t f = 0; f < split.folds.size(); ++f)
            if (!verify_fold_data(split.folds[f], split.folds[f].training)) ++rejected_good;

        std::vector<LosoSplit> corrupted(5, split);
        corrupted[0].folds[0].training.push_back(ids[0]);          // leak held-out into training
        corrupted[1].folds.pop_back();                              // a participant never held out
        corrupted[2].folds[n - 1].held_out = ids[0];                // held out twice
        corrupted[3].folds[0].training.pop_back();                  // training misses a participant
        corrupted[4].folds[0].training.push_back("stranger");       // outsider in training
        for (const auto& c : corrupted)
            if (verify_loso(c, ids)) ++accepted_bad;
        std::vector<std::string> leaky = split.folds[0].training;
        leaky.push_back(split.folds[0].held_out);
        if (verify_fold_data(split.folds[0], leaky)) ++accepted_bad;
    }

    auto method = [](const std::string& name, const std::vector<double>& f1) {
        MethodScores m;
        m.method = name;
        for (std::size_t i = 0; i < f1.size(); ++i) {
            ParticipantScore s;
            s.participant_id = "P" + std::to_string(i);
            s.f1.value = f1[i];
            m.participants.push_back(s);
        }
        return m;
    };
    struct Case {
        std::vector<MethodScores> methods;
        std::size_t winner;
    };
    const std::vector<Case> cases{
        // Highest median wins even with fewer participants above 0.8.
        {{method("a", {0.95, 0.95, 0.5, 0.5, 0.5}), method("b", {0.7, 0.7, 0.7, 0.7, 0.7})}, 1},
        // Equal medians; the fraction above 0.8 decides.
        {{method("a", {0.6, 0.7, 0.75, 0.78, 0.9}), method("b", {0.1, 0.2, 0.75, 0.85, 0.95}),
          method("c", {0.75, 0.75, 0.75, 0.75, 0.99})},
         1},
        // Full tie keeps the first listed.
        {{method("a", {0.9, 0.6, 0.85}), method("b", {0.85, 0.9, 0.6})}, 0},
        // Middle method best on median.
        {{method("a", {0.5, 0.6}), method("b", {0.9, 0.92}), method("c", {0.91, 0.6})}, 1},
    };
    std::size_t wrong = 0;
    for (const auto& c : cases)
        if (compare_scores(c.methods).selected != c.winner) ++wrong;

    // On synthetic data State_frame reproduces the annotations exactly, so it must be chosen over pooling.
    SynthConfig sc;
    sc.seed = 9;
    sc.participants = 4;
    sc.sessions_per_participant = 1;
    sc.session_minutes = 0.5;
    const auto cohort = synthesize(sc);
    Dataset data;
    for (const auto& s : cohort.sessions) data.sessions.push_back({s.manifest, dedupe_per_frame(s.detections)});
    data.annotations = cohort.annotations;
    const Method methods[] = {Method::StatePool, Method::StateFrame};
    const auto cmp = compare_methods(data, methods, {});
    const bool end_to_end_winner = cmp.methods[cmp.selected] == "state-frame";

    return {rejected_good == 0 && accepted_bad == 0 && wrong == 0 && end_to_end_winner,
            fmt("%zu generated splits, %zu valid rejected, %zu corrupted accepted; selection %zu/%zu constructed "
                "fixtures correct; pipeline selects %s",
                generated, rejected_good, accepted_bad, cases.size() - wrong, cases.size(),
                cmp.methods[cmp.selected].c_str())};
}

// 8. Report structure and determinism.
Outcome report() {
    std::size_t bad_shape = 0;
    SynthConfig sc;
    sc.seed = 12;
    sc.participants = 10;
    sc.sessions_per_participant = 1;
    sc.session_minutes = 0.5;
    sc.clinical_noise = 0.1;
    const auto cohort = synthesize(sc);
    std::vector<ParticipantMeasures> measures;
    for (const auto& t : cohort.truth) measures.push_back(t.measures);
    const std::vector<std::string> bi_cols{"UEMS_tot", "SCIM_TOT", "SCIM_S", "SCIM_RS", "SCIM_M"};
    const std::vector<std::string> uni_cols{"UEMS",  "GR-Str", "GR-Sens(dorsal)", "GR-Sens(palmar)",
                                            "GR-Sens", "GR-PA", "GR-PP",          "GR-tot"};
    const std::map<Block, std::vector<std::string>> rows{
        {Block::BilateralVsBilateral, {"Perc_Bi", "Dur_Bi", "Num_Bi"}},
        {Block::DominantVsBilateral, {"Perc_DH", "Dur_DH", "Num_DH"}},
        {Block::NondominantVsBilateral, {"Perc_NH", "Dur_NH", "Num_NH"}},
        {Block::DominantVsUnilateral, {"Perc_DH", "Dur_DH", "Num_DH"}},
        {Block::NondominantVsUnilateral, {"Perc_NH", "Dur_NH", "Num_NH"}},
    };
    std::size_t star_errors = 0, cells = 0;
    for (Block b : kAllBlocks) {
        const auto m = correlate_block(measures, cohort.clinical, b);
        const bool unilateral = b == Block::DominantVsUnilateral || b == Block::NondominantVsUnilateral;
        const auto& cols = unilateral ? uni_cols : bi_cols;
        if (m.rows != rows.at(b) || m.cols != cols || m.cells.size() != 3 * cols.size()) ++bad_shape;
        for (const auto& c : m.cells) {
            ++cells;
            if (c.status != stats::CellStatus::Ok) continue;
            const auto want = c.p < 0.001 ? stats::Stars::Three
                              : c.p < 0.01 ? stats::Stars::Two
                              : c.p < 0.05 ? stats::Stars::One
                                           : stats::Stars::None;
            star_errors += c.stars != want;
        }
    }
    const std::pair<double, stats::Stars> edges[] = {
        {0.05, stats::Stars::None},        {std::nextafter(0.05, 0.0), stats::Stars::One},
        {0.01, stats::Stars::One},         {std::nextafter(0.01, 0.0), stats::Stars::Two},
        {0.001, stats::Stars::Two},        {std::nextafter(0.001, 0.0), stats::Stars::Three},
        {0.0, stats::Stars::Three},        {1.0, stats::Stars::None}};
    for (auto [p, s] : edges) star_errors += stats::stars_for(p) != s;

    // Two independent seeded runs of the whole command chain must produce identical bytes.
    std::vector<std::map<std::string, std::string>> runs;
    for (int r = 0; r < 2; ++r) {
        const auto dir = scratch("report_" + std::to_string(r));
        std::ostringstream log;
        RunConfig cfg;
        cfg.synth = sc;
        cfg.synth.participants = 4;
        cfg.training.seed = 3;
        cfg.training.max_epochs = 5;
        cfg.out = (dir / "cohort").string();
        cmd_synth(cfg, log);
        cfg.detections = (dir / "cohort/detections").string();
        cfg.manifests = (dir / "cohort/manifests").string();
        cfg.annotations = (dir / "cohort/annotations.csv").string();
        cfg.clinical = (dir / "cohort/clinical.csv").string();
        cfg.methods = {Method::StateFrame, Method::StatePool, Method::ShanAnn, Method::ShanAnnPool};
        cfg.out = (dir / "evaluate").string();
        cmd_evaluate(cfg, log);
        cfg.methods = {Method::StatePool};
        cfg.out = (dir / "profiles").string();
        cmd_profile(cfg, log);
        cfg.out = (dir / "measures").string();
        cmd_measures(cfg, log);
        for (Format f : {Format::Csv, Format::JsonLines, Format::Heatmap}) {
            cfg.format = f;
            cfg.out = (dir / ("correlate" + std::string(file_extension(f)))).string();
            cmd_correlate(cfg, log);
        }
        cfg.format = Format::Csv;
        cfg.out = (dir / "model").string();
        cmd_train(cfg, log);
        std::map<std::string, std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
        runs.push_back(std::move(files));
    }
    const bool identical = runs[0] == runs[1];
    return {bad_shape == 0 && star_errors == 0 && identical && !runs[0].empty(),
            fmt("%zu blocks with wrong shape, %zu cells checked, %zu star errors; %zu output files %s across runs",
                bad_shape, cells, star_errors, runs[0].size(), identical ? "byte-identical" : "DIFFER")};
}

// 9. Throughput of the post-detection path.
Outcome throughput(Clock::time_point suite_start) {
    SynthConfig sc;
    sc.seed = 4;
    sc.participants = 1;
    sc.sessions_per_participant = 1;
    sc.session_minutes = 90;
    const auto cohort = synthesize(sc);
    const auto& session = cohort.sessions[0];
    const auto text = serialize_detections(session.detections);
    const ParticipantProfile participant = participant_profile(session.manifest);

    double best = 1e300;
    std::size_t records = 0;
    for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = Clock::now();
        const auto parsed = parse_detections(text, session.manifest);
        const auto deduped = dedupe_per_frame(parsed);
        auto left = build_profile(deduped, session.manifest, HandSide::Left);
        auto right = build_profile(deduped, session.manifest, HandSide::Right);
        const PoolingConfig pooling;
        pool_majority_in_place(left.bits, pooling);
        pool_majority_in_place(right.bits, pooling);
        const auto m = compute_session_measures(left, right, participant);
        const auto profile_text = serialize_profile(left) + serialize_profile(right);
        best = std::min(best, seconds_since(t0));
        records = parsed.size();
        if (m.dominant.total_time_s <= 0 || profile_text.empty()) return {false, "pipeline produced no output"};
    }
    const double rate = static_cast<double>(records) / best;
    const double suite = seconds_since(suite_start);
    return {rate >= 100000.0 && suite < 180.0,
            fmt("%zu records in %.3f s = %.0f records/s single-threaded; acceptance suite so far %.1f s", records, best,
                rate, suite)};
}

}  // namespace

int main() {
    const auto start = Clock::now();
    const auto profiles = corpus();
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"measure identity", measure_identity},
        {"pooling correctness", [&] { return pooling(profiles); }},
        {"event extraction", [&] { return events(profiles); }},
        {"end-to-end construction", end_to_end},
        {"statistics oracles", statistics},
        {"neural numerics", neural},
        {"protocol integrity", protocol},
        {"report structure", report},
        {"throughput", [&] { return throughput(start); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failures, criteria.size(),
                seconds_since(start));
    return failures == 0 ? 0 : 1;
}
