#include "handuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "handuse/error.hpp"
#include "text.hpp"

namespace fs = std::filesystem;

namespace handuse {

namespace {

std::string participant_name(std::size_t i, std::size_t count) {
    const int width = count >= 100 ? 3 : 2;
    std::string digits = std::to_string(i + 1);
    return "P" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0') +
           digits;
}

// Saturating map of events/hour onto (0,1).
double squash(double num_per_hour) { return num_per_hour / (num_per_hour + 120.0); }

struct PlantedHand {
    double perc = 0;
    double num = 0;
};

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double normal(double sd) { return sd > 0 ? std::normal_distribution<double>(0.0, sd)(rng_) : 0.0; }
    std::uint64_t next() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

DetectionRecord make_detection(Generator& g, const SessionManifest& m, std::int64_t frame, HandSide side,
                               ContactState state) {
    DetectionRecord r;
    r.participant_id = m.participant_id;
    r.session_id = m.session_id;
    r.frame_index = frame;
    r.hand_side = side;
    const double x1 = g.uniform(0.0, 0.6), y1 = g.uniform(0.0, 0.6);
    r.bbox = {x1, y1, x1 + g.uniform(0.05, 0.39), y1 + g.uniform(0.05, 0.39)};
    r.confidence = g.uniform(0.6, 1.0);
    r.contact_state = state;
    r.offset = {g.uniform(-0.3, 0.3), g.uniform(-0.3, 0.3), g.uniform(0.0, 0.5)};
    return r;
}

ContactState object_state(Generator& g) { return static_cast<ContactState>(g.pick(3, 4)); }
ContactState idle_state(Generator& g) { return static_cast<ContactState>(g.pick(0, 2)); }

double noisy(Generator& g, double value, double range, double noise) {
    return std::clamp(value + g.normal(noise * range), 0.0, range);
}

GrasspScores grassp_for(Generator& g, double perc, double num, double noise) {
    GrasspScores s;
    s.strength = noisy(g, 50.0 * perc, 50.0, noise);
    s.sens_dorsal = noisy(g, 12.0 * squash(num), 12.0, noise);
    s.sens_palmar = noisy(g, 12.0 * std::pow(squash(num), 1.2), 12.0, noise);
    s.sens_total = *s.sens_dorsal + *s.sens_palmar;
    s.prehension_ability = noisy(g, 12.0 * perc, 12.0, noise);
    s.prehension_performance = noisy(g, 30.0 * perc, 30.0, noise);
    s.total = *s.strength + *s.sens_total + *s.prehension_ability + *s.prehension_performance;
    return s;
}

HandUseMeasures truth_measures(std::int64_t active, std::int64_t events, std::int64_t frames, double fps) {
    HandUseMeasures m;
    m.total_time_s = static_cast<double>(frames) / fps;
    m.interaction_time_s = static_cast<double>(active) / fps;
    m.event_count = events;
    m.perc = static_cast<double>(active) / static_cast<double>(frames);
    m.num_per_hour = static_cast<double>(events) * 3600.0 * fps / static_cast<double>(frames);
    m.empty = events == 0;
    m.dur_s = m.empty ? 0.0 : static_cast<double>(active) / (fps * static_cast<double>(events));
    return m;
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << body;
}

}  // namespace

std::vector<std::uint8_t> plant_profile(std::int64_t frames, std::int64_t active, std::int64_t events,
                                        std::uint64_t seed) {
    if (frames <= 0 || active < 0 || active > frames) throw ArgumentError("plant_profile: need 0 <= active <= frames");
    if ((active == 0) != (events == 0) || events > active)
        throw ArgumentError("plant_profile: need 1 <= events <= active (or both zero)");
    const std::int64_t zeros = frames - active;
    if (events > 0 && zeros < events - 1) throw ArgumentError("plant_profile: not enough idle frames to separate events");

    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(frames));
    if (events == 0) {
        bits.assign(static_cast<std::size_t>(frames), 0);
        return bits;
    }
    std::mt19937_64 rng(seed);

    // Event lengths: a random composition of `active` into `events` positive parts.
    std::vector<std::int64_t> cuts;
    {
        std::vector<std::int64_t> candidates(static_cast<std::size_t>(active - 1));
        std::iota(candidates.begin(), candidates.end(), std::int64_t{1});
        std::sample(candidates.begin(), candidates.end(), std::back_inserter(cuts), events - 1, rng);
    }
    cuts.insert(cuts.begin(), 0);
    cuts.push_back(active);
    // Gaps: events+1 slots, inner ones at least 1 frame.
    std::vector<std::int64_t> gaps(static_cast<std::size_t>(events + 1), 0);
    for (std::size_t i = 1; i + 1 < gaps.size(); ++i) gaps[i] = 1;
    std::uniform_int_distribution<std::size_t> slot(0, gaps.size() - 1);
    for (std::int64_t z = 0; z < zeros - (events - 1); ++z) ++gaps[slot(rng)];

    for (std::int64_t e = 0; e < events; ++e) {
        bits.insert(bits.end(), static_cast<std::size_t>(gaps[static_cast<std::size_t>(e)]), 0);
        bits.insert(bits.end(), static_cast<std::size_t>(cuts[static_cast<std::size_t>(e + 1)] - cuts[static_cast<std::size_t>(e)]), 1);
    }
    bits.insert(bits.end(), static_cast<std::size_t>(gaps.back()), 0);
    return bits;
}

SynthCohort synthesize(const SynthConfig& cfg) {
    if (cfg.participants == 0 || cfg.sessions_per_participant == 0) throw ArgumentError("synth: empty cohort");
    if (!(cfg.fps > 0) || !(cfg.session_minutes > 0)) throw ArgumentError("synth: fps and session length must be > 0");
    if (!(cfg.perc_min >= 0 && cfg.perc_max <= 1 && cfg.perc_min <= cfg.perc_max))
        throw ArgumentError("synth: planted perc must lie in [0,1]");
    if (!(cfg.num_min >= 0 && cfg.num_min <= cfg.num_max)) throw ArgumentError("synth: planted num range invalid");
    if (!(cfg.label_noise >= 0 && cfg.label_noise <= 1)) throw ArgumentError("synth: label_noise must lie in [0,1]");
    if (!(cfg.clinical_noise >= 0)) throw ArgumentError("synth: clinical_noise must be >= 0");
    if (!(cfg.duplicate_rate >= 0 && cfg.duplicate_rate <= 1) ||
        !(cfg.idle_detection_rate >= 0 && cfg.idle_detection_rate <= 1))
        throw ArgumentError("synth: rates must lie in [0,1]");

    const auto frames = static_cast<std::int64_t>(std::llround(cfg.session_minutes * 60.0 * cfg.fps));
    if (frames <= 0) throw ArgumentError("synth: session shorter than one frame");

    SynthCohort cohort;
    cohort.config = cfg;
    Generator g(cfg.seed);
    const std::size_t annotated = cfg.annotated_participants == 0 ? cfg.participants : cfg.annotated_participants;

    for (std::size_t p = 0; p < cfg.participants; ++p) {
        const auto pid = participant_name(p, cfg.participants);
        const HandSide dominant = g.chance(0.75) ? HandSide::Right : HandSide::Left;
        const HandSide pre = g.chance(0.85) ? dominant : opposite(dominant);
        PlantedHand planted[2];  // [dominant, nondominant]
        for (auto& h : planted) h = {g.uniform(cfg.perc_min, cfg.perc_max), g.uniform(cfg.num_min, cfg.num_max)};

        TruthRow truth;
        truth.participant_id = pid;
        truth.dominant_side = dominant;

        for (std::size_t s = 0; s < cfg.sessions_per_participant; ++s) {
            SynthSession session;
            auto& m = session.manifest;
            m.participant_id = pid;
            m.session_id = "S" + std::to_string(s + 1);
            m.fps = cfg.fps;
            m.frame_count = frames;
            m.dominant_side_post_injury = dominant;
            m.dominant_side_pre_injury = pre;

            std::vector<std::uint8_t> bits[2];
            for (int h = 0; h < 2; ++h) {
                const auto active = static_cast<std::int64_t>(std::llround(planted[h].perc * static_cast<double>(frames)));
                auto events = static_cast<std::int64_t>(
                    std::llround(planted[h].num * static_cast<double>(frames) / (cfg.fps * 3600.0)));
                if (active == 0) {
                    events = 0;
                } else {
                    events = std::clamp<std::int64_t>(events, 1, active);
                    events = std::min(events, frames - active + 1);
                }
                bits[h] = plant_profile(frames, active, events, g.next());
                (h == 0 ? truth.dominant_active_frames : truth.nondominant_active_frames) += active;
                (h == 0 ? truth.dominant_events : truth.nondominant_events) += events;
            }
            truth.total_frames += frames;

            const bool left_dominant = dominant == HandSide::Left;
            session.left = {pid, m.session_id, HandSide::Left, cfg.fps, bits[left_dominant ? 0 : 1]};
            session.right = {pid, m.session_id, HandSide::Right, cfg.fps, bits[left_dominant ? 1 : 0]};

            for (std::int64_t f = 0; f < frames; ++f) {
                for (auto side : {HandSide::Left, HandSide::Right}) {
                    const bool active = session.for_side(side).bits[static_cast<std::size_t>(f)] != 0;
                    if (!active && !g.chance(cfg.idle_detection_rate)) continue;
                    auto rec = make_detection(g, m, f, side, active ? object_state(g) : idle_state(g));
                    if (g.chance(cfg.duplicate_rate)) {
                        auto dup = make_detection(g, m, f, side, active ? idle_state(g) : object_state(g));
                        dup.confidence = rec.confidence * g.uniform(0.3, 0.95);
                        const bool before = g.chance(0.5);
                        if (before) session.detections.push_back(dup);
                        session.detections.push_back(rec);
                        if (!before) session.detections.push_back(dup);
                    } else {
                        session.detections.push_back(std::move(rec));
                    }
                }
            }

            if (p < annotated) {
                for (std::int64_t f = 0; f < frames; ++f) {
                    for (auto side : {HandSide::Left, HandSide::Right}) {
                        std::uint8_t label = session.for_side(side).bits[static_cast<std::size_t>(f)];
                        if (cfg.label_noise > 0 && g.chance(cfg.label_noise)) label ^= 1;
                        cohort.annotations.push_back({pid, m.session_id, f, side, label});
                    }
                }
            }
            cohort.sessions.push_back(std::move(session));
        }

        auto& pm = truth.measures;
        pm.participant_id = pid;
        pm.dominant = truth_measures(truth.dominant_active_frames, truth.dominant_events, truth.total_frames, cfg.fps);
        pm.nondominant =
            truth_measures(truth.nondominant_active_frames, truth.nondominant_events, truth.total_frames, cfg.fps);
        pm.bilateral = bilateral(pm.dominant, pm.nondominant);

        // Clinical scores are monotone in the realized measures, plus optional noise.
        ClinicalRecord c;
        c.participant_id = pid;
        const double noise = cfg.clinical_noise;
        c.uems_dominant = noisy(g, 25.0 * pm.dominant.perc, 25.0, noise);
        c.uems_nondominant = noisy(g, 25.0 * pm.nondominant.perc, 25.0, noise);
        c.uems_total = *c.uems_dominant + *c.uems_nondominant;
        c.grassp_dominant = grassp_for(g, pm.dominant.perc, pm.dominant.num_per_hour, noise);
        c.grassp_nondominant = grassp_for(g, pm.nondominant.perc, pm.nondominant.num_per_hour, noise);
        c.scim_self_care = noisy(g, 20.0 * pm.bilateral.perc_bi, 20.0, noise);
        c.scim_respiration_sphincter = noisy(g, 40.0 * squash(pm.bilateral.num_bi_per_hour / 2.0), 40.0, noise);
        c.scim_mobility = noisy(g, 40.0 * squash(pm.bilateral.num_bi_per_hour / 2.0), 40.0, noise);
        c.scim_total = *c.scim_self_care + *c.scim_respiration_sphincter + *c.scim_mobility;
        cohort.clinical.push_back(std::move(c));
        cohort.truth.push_back(std::move(truth));
    }
    return cohort;
}

std::string serialize_truth(const std::vector<TruthRow>& truth) {
    std::string s =
        "participant_id,hand,hand_side,active_frames,event_count,total_frames,perc,dur_s,num_per_hour\n";
    for (const auto& t : truth) {
        auto row = [&](const char* hand, HandSide side, std::int64_t active, std::int64_t events,
                       const HandUseMeasures& m) {
            s += t.participant_id + ',' + hand + ',' + std::string(to_string(side)) + ',' + std::to_string(active) +
                 ',' + std::to_string(events) + ',' + std::to_string(t.total_frames) + ',' + text::exact(m.perc) +
                 ',' + text::exact(m.dur_s) + ',' + text::exact(m.num_per_hour) + '\n';
        };
        row("dom", t.dominant_side, t.dominant_active_frames, t.dominant_events, t.measures.dominant);
        row("nondom", opposite(t.dominant_side), t.nondominant_active_frames, t.nondominant_events,
            t.measures.nondominant);
    }
    return s;
}

void write_cohort(const SynthCohort& cohort, const std::string& dir) {
    const fs::path root(dir);
    fs::create_directories(root / "detections");
    fs::create_directories(root / "manifests");
    for (const auto& s : cohort.sessions) {
        const auto stem = s.manifest.participant_id + "_" + s.manifest.session_id;
        write_text(root / "manifests" / (stem + ".manifest"), serialize_manifest(s.manifest));
        write_text(root / "detections" / (stem + ".det"), serialize_detections(s.detections));
    }
    write_text(root / "annotations.csv", serialize_annotations(cohort.annotations));
    write_text(root / "clinical.csv", serialize_clinical(cohort.clinical));
    write_text(root / "truth.csv", serialize_truth(cohort.truth));
}

}  // namespace handuse
