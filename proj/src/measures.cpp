#include "handuse/measures.hpp"

#include <map>

#include "handuse/error.hpp"
#include "text.hpp"

namespace handuse {

namespace {

constexpr double kSecondsPerHour = 3600.0;

HandUseMeasures from_totals(double interaction_s, double total_s, std::int64_t events) {
    HandUseMeasures m;
    m.total_time_s = total_s;
    m.interaction_time_s = interaction_s;
    m.event_count = events;
    m.perc = interaction_s / total_s;
    m.num_per_hour = static_cast<double>(events) * kSecondsPerHour / total_s;
    m.empty = events == 0;
    m.dur_s = m.empty ? 0.0 : interaction_s / static_cast<double>(events);
    return m;
}

}  // namespace

std::vector<InteractionEvent> extract_events(const InteractionProfile& profile) {
    std::vector<InteractionEvent> events;
    const auto& bits = profile.bits;
    std::size_t i = 0;
    while (i < bits.size()) {
        if (!bits[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < bits.size() && bits[j]) ++j;
        events.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j),
                          static_cast<double>(j - i) / profile.fps});
        i = j;
    }
    return events;
}

HandUseMeasures compute_measures(const InteractionProfile& profile) {
    if (profile.bits.empty()) throw ArgumentError("cannot compute measures of an empty profile");
    if (!(profile.fps > 0)) throw ArgumentError("fps must be > 0");
    std::int64_t ones = 0;
    std::int64_t events = 0;
    std::uint8_t prev = 0;
    for (auto b : profile.bits) {
        ones += b;
        events += (b && !prev) ? 1 : 0;
        prev = b;
    }
    const double total_s = static_cast<double>(profile.bits.size()) / profile.fps;
    const double interaction_s = static_cast<double>(ones) / profile.fps;
    return from_totals(interaction_s, total_s, events);
}

BilateralMeasures bilateral(const HandUseMeasures& dom, const HandUseMeasures& nondom) {
    return {(dom.perc + nondom.perc) / 2.0, dom.dur_s + nondom.dur_s, dom.num_per_hour + nondom.num_per_hour};
}

SessionMeasures compute_session_measures(const InteractionProfile& left, const InteractionProfile& right,
                                         const ParticipantProfile& participant) {
    if (left.bits.size() != right.bits.size())
        throw ArgumentError("left and right profiles differ in length (" + std::to_string(left.bits.size()) +
                            " vs " + std::to_string(right.bits.size()) + ")");
    if (left.fps != right.fps) throw ArgumentError("left and right profiles differ in fps");
    const bool left_dominant = participant.dominant_side_post_injury == HandSide::Left;
    SessionMeasures out;
    out.dominant = compute_measures(left_dominant ? left : right);
    out.nondominant = compute_measures(left_dominant ? right : left);
    out.bilateral = bilateral(out.dominant, out.nondominant);
    return out;
}

HandUseMeasures aggregate_participant(std::span<const HandUseMeasures> sessions) {
    if (sessions.empty()) throw ArgumentError("aggregate_participant needs at least one session");
    if (sessions.size() == 1) return sessions.front();
    double interaction = 0, total = 0;
    std::int64_t events = 0;
    for (const auto& s : sessions) {
        interaction += s.interaction_time_s;
        total += s.total_time_s;
        events += s.event_count;
    }
    return from_totals(interaction, total, events);
}

std::string serialize_measures_table(std::span<const ParticipantMeasures> rows) {
    std::string s = "participant_id,hand,perc,dur_s,num_per_hour,event_count,total_time_s,empty_flag\n";
    auto row = [&](const std::string& id, const char* hand, double perc, double dur, double num, std::int64_t n,
                   double total, bool empty) {
        s += id + ',' + hand + ',' + text::sig6(perc) + ',' + text::sig6(dur) + ',' + text::sig6(num) + ',' +
             std::to_string(n) + ',' + text::sig6(total) + ',' + (empty ? "1" : "0") + '\n';
    };
    for (const auto& p : rows) {
        const auto& d = p.dominant;
        const auto& n = p.nondominant;
        row(p.participant_id, "dom", d.perc, d.dur_s, d.num_per_hour, d.event_count, d.total_time_s, d.empty);
        row(p.participant_id, "nondom", n.perc, n.dur_s, n.num_per_hour, n.event_count, n.total_time_s, n.empty);
        row(p.participant_id, "bilateral", p.bilateral.perc_bi, p.bilateral.dur_bi_s, p.bilateral.num_bi_per_hour,
            d.event_count + n.event_count, d.total_time_s, d.empty && n.empty);
    }
    return s;
}

std::vector<ParticipantMeasures> parse_measures_table(std::string_view body) {
    std::vector<ParticipantMeasures> out;
    std::map<std::string, std::size_t> index;
    std::vector<std::string_view> f;
    bool header = false;
    text::for_each_line(body, [&](std::size_t line, std::string_view l) {
        if (text::skippable(l)) return;
        text::split(l, ',', f);
        if (!header) {
            if (l != "participant_id,hand,perc,dur_s,num_per_hour,event_count,total_time_s,empty_flag")
                throw ParseError(line, "unexpected measures table header");
            header = true;
            return;
        }
        if (f.size() != 8) throw ParseError(line, "expected 8 fields, got " + std::to_string(f.size()));
        auto num = [&](std::size_t i, const char* name) {
            auto v = text::to_double(f[i]);
            if (!v) throw ParseError(line, std::string("field '") + name + "' is not a number");
            return *v;
        };
        auto count = text::to_int(f[5]);
        if (!count || *count < 0) throw ParseError(line, "field 'event_count' is not a non-negative integer");
        if (f[7] != "0" && f[7] != "1") throw ParseError(line, "empty_flag must be 0 or 1");
        std::string id(f[0]);
        auto [it, inserted] = index.try_emplace(id, out.size());
        if (inserted) out.push_back({id, {}, {}, {}});
        auto& p = out[it->second];
        if (f[1] == "bilateral") {
            p.bilateral = {num(2, "perc"), num(3, "dur_s"), num(4, "num_per_hour")};
            return;
        }
        HandUseMeasures m;
        m.perc = num(2, "perc");
        m.dur_s = num(3, "dur_s");
        m.num_per_hour = num(4, "num_per_hour");
        m.event_count = *count;
        m.total_time_s = num(6, "total_time_s");
        m.interaction_time_s = m.perc * m.total_time_s;
        m.empty = f[7] == "1";
        if (f[1] == "dom")
            p.dominant = m;
        else if (f[1] == "nondom")
            p.nondominant = m;
        else
            throw ValidationError("hand", "line " + std::to_string(line) + ": expected dom, nondom or bilateral");
    });
    return out;
}

}  // namespace handuse
