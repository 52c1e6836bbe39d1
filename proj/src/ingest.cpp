#include "handuse/ingest.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "handuse/error.hpp"
#include "text.hpp"

namespace handuse {

namespace {

std::string at_line(std::size_t line, const std::string& msg) {
    return "line " + std::to_string(line) + ": " + msg;
}

HandSide parse_side(std::string_view token, const char* field, std::size_t line) {
    if (token == "L") return HandSide::Left;
    if (token == "R") return HandSide::Right;
    throw ValidationError(field, at_line(line, "expected L or R, got '" + std::string(token) + "'"));
}

double parse_number(std::string_view token, const char* field, std::size_t line) {
    auto v = text::to_double(token);
    if (!v) throw ParseError(line, "field '" + std::string(field) + "' is not a number: '" + std::string(token) + "'");
    if (!std::isfinite(*v)) throw ValidationError(field, at_line(line, "not finite"));
    return *v;
}

std::int64_t parse_integer(std::string_view token, const char* field, std::size_t line) {
    auto v = text::to_int(token);
    if (!v) throw ParseError(line, "field '" + std::string(field) + "' is not an integer: '" + std::string(token) + "'");
    return *v;
}

void check_unit(double v, const char* field, std::size_t line) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError(field, at_line(line, text::exact(v) + " not in [0,1]"));
}

void validate_detection(const DetectionRecord& r, std::size_t line) {
    if (r.frame_index < 0) throw ValidationError("frame_index", at_line(line, "negative"));
    check_unit(r.bbox.x1, "x1", line);
    check_unit(r.bbox.y1, "y1", line);
    check_unit(r.bbox.x2, "x2", line);
    check_unit(r.bbox.y2, "y2", line);
    if (!(r.bbox.x1 < r.bbox.x2)) throw ValidationError("x2", at_line(line, "x1 must be < x2"));
    if (!(r.bbox.y1 < r.bbox.y2)) throw ValidationError("y2", at_line(line, "y1 must be < y2"));
    check_unit(r.confidence, "confidence", line);
    if (static_cast<int>(r.contact_state) > 4) throw ValidationError("contact_state", at_line(line, "not in 0..4"));
    if (!std::isfinite(r.offset.dx)) throw ValidationError("dx", at_line(line, "not finite"));
    if (!std::isfinite(r.offset.dy)) throw ValidationError("dy", at_line(line, "not finite"));
    if (!(r.offset.magnitude >= 0.0) || !std::isfinite(r.offset.magnitude))
        throw ValidationError("magnitude", at_line(line, "must be finite and >= 0"));
}

std::optional<double> parse_optional(std::string_view token, const std::string& field, std::size_t line) {
    if (token.empty() || token == "NA") return std::nullopt;
    auto v = text::to_double(token);
    if (!v) throw ParseError(line, "field '" + field + "' is not a number: '" + std::string(token) + "'");
    if (!std::isfinite(*v)) throw ValidationError(field, at_line(line, "not finite"));
    return v;
}

std::string format_optional(const std::optional<double>& v) { return v ? text::exact(*v) : std::string("NA"); }

// Column name -> accessor. Order here is the serialization order.
using ClinicalField = std::optional<double> ClinicalRecord::*;
struct ClinicalColumn {
    const char* name;
    std::optional<double>* (*get)(ClinicalRecord&);
};

template <std::optional<double> GrasspScores::*M, bool Dominant>
std::optional<double>* grassp(ClinicalRecord& r) {
    return &((Dominant ? r.grassp_dominant : r.grassp_nondominant).*M);
}
template <ClinicalField M>
std::optional<double>* direct(ClinicalRecord& r) {
    return &(r.*M);
}

const std::array<ClinicalColumn, 21> kClinicalColumns{{
    {"uems_dom", &direct<&ClinicalRecord::uems_dominant>},
    {"uems_nondom", &direct<&ClinicalRecord::uems_nondominant>},
    {"uems_total", &direct<&ClinicalRecord::uems_total>},
    {"gr_str_dom", &grassp<&GrasspScores::strength, true>},
    {"gr_sens_dorsal_dom", &grassp<&GrasspScores::sens_dorsal, true>},
    {"gr_sens_palmar_dom", &grassp<&GrasspScores::sens_palmar, true>},
    {"gr_sens_dom", &grassp<&GrasspScores::sens_total, true>},
    {"gr_pa_dom", &grassp<&GrasspScores::prehension_ability, true>},
    {"gr_pp_dom", &grassp<&GrasspScores::prehension_performance, true>},
    {"gr_total_dom", &grassp<&GrasspScores::total, true>},
    {"gr_str_nondom", &grassp<&GrasspScores::strength, false>},
    {"gr_sens_dorsal_nondom", &grassp<&GrasspScores::sens_dorsal, false>},
    {"gr_sens_palmar_nondom", &grassp<&GrasspScores::sens_palmar, false>},
    {"gr_sens_nondom", &grassp<&GrasspScores::sens_total, false>},
    {"gr_pa_nondom", &grassp<&GrasspScores::prehension_ability, false>},
    {"gr_pp_nondom", &grassp<&GrasspScores::prehension_performance, false>},
    {"gr_total_nondom", &grassp<&GrasspScores::total, false>},
    {"scim_s", &direct<&ClinicalRecord::scim_self_care>},
    {"scim_rs", &direct<&ClinicalRecord::scim_respiration_sphincter>},
    {"scim_m", &direct<&ClinicalRecord::scim_mobility>},
    {"scim_total", &direct<&ClinicalRecord::scim_total>},
}};

constexpr double kSumTolerance = 1e-9;

void check_range(const std::optional<double>& v, const char* field, double lo, double hi) {
    if (v && !(*v >= lo && *v <= hi))
        throw ValidationError(field, text::exact(*v) + " not in [" + text::exact(lo) + "," + text::exact(hi) + "]");
}

void check_grassp(const GrasspScores& g, const char* suffix) {
    auto nonneg = [&](const std::optional<double>& v, const char* base) {
        if (v && *v < 0) throw ValidationError(std::string(base) + suffix, "must be >= 0");
    };
    nonneg(g.strength, "gr_str_");
    nonneg(g.sens_dorsal, "gr_sens_dorsal_");
    nonneg(g.sens_palmar, "gr_sens_palmar_");
    nonneg(g.sens_total, "gr_sens_");
    nonneg(g.prehension_ability, "gr_pa_");
    nonneg(g.prehension_performance, "gr_pp_");
    nonneg(g.total, "gr_total_");
    if (g.sens_dorsal && g.sens_palmar && g.sens_total &&
        std::abs(*g.sens_dorsal + *g.sens_palmar - *g.sens_total) > kSumTolerance)
        throw ValidationError(std::string("gr_sens_") + suffix, "must equal dorsal + palmar sensation");
}

}  // namespace

std::string_view to_string(HandSide side) { return side == HandSide::Left ? "L" : "R"; }

HandSide opposite(HandSide side) { return side == HandSide::Left ? HandSide::Right : HandSide::Left; }

void validate(const DetectionRecord& record) { validate_detection(record, 0); }

std::vector<DetectionRecord> parse_detections(std::string_view body, const SessionManifest& manifest) {
    std::vector<DetectionRecord> out;
    std::vector<std::string_view> f;
    text::for_each_line(body, [&](std::size_t line, std::string_view l) {
        if (text::skippable(l)) return;
        text::split(l, ',', f);
        if (f.size() != 13)
            throw ParseError(line, "expected 13 fields, got " + std::to_string(f.size()));
        DetectionRecord r;
        r.participant_id = std::string(f[0]);
        r.session_id = std::string(f[1]);
        if (r.participant_id != manifest.participant_id)
            throw ValidationError("participant_id", at_line(line, "'" + r.participant_id + "' does not match manifest"));
        if (r.session_id != manifest.session_id)
            throw ValidationError("session_id", at_line(line, "'" + r.session_id + "' does not match manifest"));
        r.frame_index = parse_integer(f[2], "frame_index", line);
        r.hand_side = parse_side(f[3], "hand_side", line);
        r.bbox = {parse_number(f[4], "x1", line), parse_number(f[5], "y1", line),
                  parse_number(f[6], "x2", line), parse_number(f[7], "y2", line)};
        r.confidence = parse_number(f[8], "confidence", line);
        auto state = parse_integer(f[9], "contact_state", line);
        if (state < 0 || state > 4) throw ValidationError("contact_state", at_line(line, "not in 0..4"));
        r.contact_state = static_cast<ContactState>(state);
        r.offset = {parse_number(f[10], "dx", line), parse_number(f[11], "dy", line),
                    parse_number(f[12], "magnitude", line)};
        validate_detection(r, line);
        if (r.frame_index >= manifest.frame_count)
            throw RangeError(at_line(line, "frame_index " + std::to_string(r.frame_index) +
                                               " >= frame_count " + std::to_string(manifest.frame_count)));
        out.push_back(std::move(r));
    });
    return out;
}

std::string serialize_detection(const DetectionRecord& r) {
    std::string s;
    s.reserve(128);
    s += r.participant_id;
    s += ',';
    s += r.session_id;
    s += ',';
    s += std::to_string(r.frame_index);
    s += ',';
    s += to_string(r.hand_side);
    for (double v : {r.bbox.x1, r.bbox.y1, r.bbox.x2, r.bbox.y2, r.confidence}) {
        s += ',';
        s += text::exact(v);
    }
    s += ',';
    s += std::to_string(static_cast<int>(r.contact_state));
    for (double v : {r.offset.dx, r.offset.dy, r.offset.magnitude}) {
        s += ',';
        s += text::exact(v);
    }
    return s;
}

std::string serialize_detections(std::span<const DetectionRecord> records) {
    std::string s;
    for (const auto& r : records) {
        s += serialize_detection(r);
        s += '\n';
    }
    return s;
}

std::vector<DetectionRecord> dedupe_per_frame(std::span<const DetectionRecord> records) {
    // (frame, side) -> index of the current winner
    std::unordered_map<std::int64_t, std::size_t> best;
    best.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        auto key = r.frame_index * 2 + (r.hand_side == HandSide::Right ? 1 : 0);
        auto [it, inserted] = best.try_emplace(key, i);
        if (!inserted && r.confidence > records[it->second].confidence) it->second = i;
    }
    std::vector<bool> keep(records.size(), false);
    for (const auto& [key, idx] : best) keep[idx] = true;
    std::vector<DetectionRecord> out;
    out.reserve(best.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        if (keep[i]) out.push_back(records[i]);
    return out;
}

SessionManifest parse_manifest(std::string_view body) {
    SessionManifest m;
    bool have_pid = false, have_sid = false, have_frames = false, have_post = false, have_pre = false;
    text::for_each_line(body, [&](std::size_t line, std::string_view l) {
        if (text::skippable(l)) return;
        auto eq = l.find('=');
        if (eq == std::string_view::npos) throw ParseError(line, "expected 'key = value'");
        auto key = text::trim(l.substr(0, eq));
        auto value = text::trim(l.substr(eq + 1));
        if (key == "participant_id") {
            if (value.empty()) throw ValidationError("participant_id", "empty");
            m.participant_id = std::string(value);
            have_pid = true;
        } else if (key == "session_id") {
            if (value.empty()) throw ValidationError("session_id", "empty");
            m.session_id = std::string(value);
            have_sid = true;
        } else if (key == "fps") {
            m.fps = parse_number(value, "fps", line);
            if (!(m.fps > 0)) throw ValidationError("fps", at_line(line, "must be > 0"));
        } else if (key == "frame_count") {
            m.frame_count = parse_integer(value, "frame_count", line);
            if (m.frame_count <= 0) throw ValidationError("frame_count", at_line(line, "must be > 0"));
            have_frames = true;
        } else if (key == "frame_width") {
            m.frame_width = static_cast<int>(parse_integer(value, "frame_width", line));
            if (m.frame_width <= 0) throw ValidationError("frame_width", at_line(line, "must be > 0"));
        } else if (key == "frame_height") {
            m.frame_height = static_cast<int>(parse_integer(value, "frame_height", line));
            if (m.frame_height <= 0) throw ValidationError("frame_height", at_line(line, "must be > 0"));
        } else if (key == "dominant_side_post_injury") {
            m.dominant_side_post_injury = parse_side(value, "dominant_side_post_injury", line);
            have_post = true;
        } else if (key == "dominant_side_pre_injury") {
            m.dominant_side_pre_injury = parse_side(value, "dominant_side_pre_injury", line);
            have_pre = true;
        } else {
            throw ValidationError(std::string(key), at_line(line, "unknown manifest key"));
        }
    });
    if (!have_pid) throw ValidationError("participant_id", "missing");
    if (!have_sid) throw ValidationError("session_id", "missing");
    if (!have_frames) throw ValidationError("frame_count", "missing");
    if (!have_post) throw ValidationError("dominant_side_post_injury", "missing");
    if (!have_pre) throw ValidationError("dominant_side_pre_injury", "missing");
    return m;
}

std::string serialize_manifest(const SessionManifest& m) {
    std::ostringstream os;
    os << "participant_id = " << m.participant_id << '\n'
       << "session_id = " << m.session_id << '\n'
       << "fps = " << text::exact(m.fps) << '\n'
       << "frame_count = " << m.frame_count << '\n'
       << "frame_width = " << m.frame_width << '\n'
       << "frame_height = " << m.frame_height << '\n'
       << "dominant_side_post_injury = " << to_string(m.dominant_side_post_injury) << '\n'
       << "dominant_side_pre_injury = " << to_string(m.dominant_side_pre_injury) << '\n';
    return os.str();
}

ParticipantProfile participant_profile(const SessionManifest& m) {
    return {m.participant_id, m.dominant_side_post_injury, m.dominant_side_pre_injury};
}

std::vector<AnnotationRecord> parse_annotations(std::string_view body) {
    std::vector<AnnotationRecord> out;
    std::vector<std::string_view> f;
    bool header_seen = false;
    text::for_each_line(body, [&](std::size_t line, std::string_view l) {
        if (text::skippable(l)) return;
        text::split(l, ',', f);
        if (!header_seen) {
            if (f.size() != 5 || f[0] != "participant_id" || f[1] != "session_id" || f[2] != "frame_index" ||
                f[3] != "hand_side" || f[4] != "label")
                throw ParseError(line, "expected header participant_id,session_id,frame_index,hand_side,label");
            header_seen = true;
            return;
        }
        if (f.size() != 5) throw ParseError(line, "expected 5 fields, got " + std::to_string(f.size()));
        AnnotationRecord a;
        a.participant_id = std::string(f[0]);
        a.session_id = std::string(f[1]);
        a.frame_index = parse_integer(f[2], "frame_index", line);
        if (a.frame_index < 0) throw ValidationError("frame_index", at_line(line, "negative"));
        a.hand_side = parse_side(f[3], "hand_side", line);
        auto label = parse_integer(f[4], "label", line);
        if (label != 0 && label != 1) throw ValidationError("label", at_line(line, "must be 0 or 1"));
        a.label = static_cast<std::uint8_t>(label);
        out.push_back(std::move(a));
    });
    return out;
}

std::string serialize_annotations(std::span<const AnnotationRecord> records) {
    std::string s = "participant_id,session_id,frame_index,hand_side,label\n";
    for (const auto& a : records) {
        s += a.participant_id + ',' + a.session_id + ',' + std::to_string(a.frame_index) + ',' +
             std::string(to_string(a.hand_side)) + ',' + std::to_string(a.label) + '\n';
    }
    return s;
}

void validate(const ClinicalRecord& r) {
    if (r.participant_id.empty()) throw ValidationError("participant_id", "empty");
    check_range(r.uems_dominant, "uems_dom", 0, 25);
    check_range(r.uems_nondominant, "uems_nondom", 0, 25);
    check_range(r.uems_total, "uems_total", 0, 50);
    if (r.uems_dominant && r.uems_nondominant && r.uems_total &&
        std::abs(*r.uems_dominant + *r.uems_nondominant - *r.uems_total) > kSumTolerance)
        throw ValidationError("uems_total", "must equal uems_dom + uems_nondom");
    check_grassp(r.grassp_dominant, "dom");
    check_grassp(r.grassp_nondominant, "nondom");
    check_range(r.scim_self_care, "scim_s", 0, 100);
    check_range(r.scim_respiration_sphincter, "scim_rs", 0, 100);
    check_range(r.scim_mobility, "scim_m", 0, 100);
    check_range(r.scim_total, "scim_total", 0, 100);
}

std::vector<ClinicalRecord> parse_clinical(std::string_view body) {
    std::vector<ClinicalRecord> out;
    std::vector<std::string_view> f;
    // column position -> index into kClinicalColumns (or -1 for participant_id)
    std::vector<int> layout;
    text::for_each_line(body, [&](std::size_t line, std::string_view l) {
        if (text::skippable(l)) return;
        text::split(l, ',', f);
        if (layout.empty()) {
            bool have_id = false;
            for (auto name : f) {
                if (name == "participant_id") {
                    if (have_id) throw ParseError(line, "duplicate column 'participant_id'");
                    have_id = true;
                    layout.push_back(-1);
                    continue;
                }
                int found = -2;
                for (std::size_t c = 0; c < kClinicalColumns.size(); ++c)
                    if (name == kClinicalColumns[c].name) found = static_cast<int>(c);
                if (found == -2) throw ValidationError(std::string(name), at_line(line, "unknown clinical column"));
                for (int prev : layout)
                    if (prev == found) throw ParseError(line, "duplicate column '" + std::string(name) + "'");
                layout.push_back(found);
            }
            if (!have_id) throw ParseError(line, "header lacks participant_id column");
            return;
        }
        if (f.size() != layout.size())
            throw ParseError(line, "expected " + std::to_string(layout.size()) + " fields, got " + std::to_string(f.size()));
        ClinicalRecord r;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (layout[i] == -1) {
                r.participant_id = std::string(f[i]);
                continue;
            }
            const auto& col = kClinicalColumns[static_cast<std::size_t>(layout[i])];
            *col.get(r) = parse_optional(f[i], col.name, line);
        }
        try {
            validate(r);
        } catch (const ValidationError& e) {
            throw ValidationError(e.field(), at_line(line, e.detail()));
        }
        out.push_back(std::move(r));
    });
    return out;
}

std::string serialize_clinical(std::span<const ClinicalRecord> records) {
    std::string s = "participant_id";
    for (const auto& c : kClinicalColumns) s += std::string(",") + c.name;
    s += '\n';
    for (const auto& r : records) {
        auto copy = r;
        s += r.participant_id;
        for (const auto& c : kClinicalColumns) s += ',' + format_optional(*c.get(copy));
        s += '\n';
    }
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace handuse
