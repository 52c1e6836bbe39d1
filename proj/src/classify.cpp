#include "handuse/classify.hpp"

#include <algorithm>

#include "handuse/error.hpp"
#include "handuse/neural.hpp"
#include "text.hpp"

namespace handuse {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::StateFrame: return "state-frame";
        case Method::StatePool: return "state-pool";
        case Method::ShanAnn: return "ann";
        case Method::ShanAnnPool: return "ann-pool";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "state-frame") return Method::StateFrame;
    if (name == "state-pool") return Method::StatePool;
    if (name == "ann") return Method::ShanAnn;
    if (name == "ann-pool") return Method::ShanAnnPool;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

bool is_pooled(Method method) { return method == Method::StatePool || method == Method::ShanAnnPool; }
bool is_neural(Method method) { return method == Method::ShanAnn || method == Method::ShanAnnPool; }

InteractionProfile build_profile(std::span<const DetectionRecord> records, const SessionManifest& manifest,
                                 HandSide side) {
    InteractionProfile p{manifest.participant_id, manifest.session_id, side, manifest.fps,
                         std::vector<std::uint8_t>(static_cast<std::size_t>(manifest.frame_count), 0)};
    for (const auto& r : records) {
        if (r.hand_side != side) continue;
        if (r.frame_index < 0 || r.frame_index >= manifest.frame_count)
            throw RangeError("frame_index " + std::to_string(r.frame_index) + " outside session of " +
                             std::to_string(manifest.frame_count) + " frames");
        p.bits[static_cast<std::size_t>(r.frame_index)] = classify_frame_by_state(r.contact_state);
    }
    return p;
}

void pool_majority_in_place(std::vector<std::uint8_t>& bits, const PoolingConfig& cfg) {
    if (cfg.window < 1) throw ArgumentError("pooling window must be >= 1");
    const auto window = static_cast<std::size_t>(cfg.window);
    for (std::size_t start = 0; start < bits.size(); start += window) {
        const auto end = std::min(bits.size(), start + window);
        std::size_t ones = 0;
        for (std::size_t i = start; i < end; ++i) ones += bits[i];
        const std::size_t len = end - start;
        std::uint8_t label;
        if (2 * ones > len)
            label = 1;
        else if (2 * ones < len)
            label = 0;
        else
            label = cfg.tie_policy == TiePolicy::OneOnTie ? 1 : 0;
        std::fill(bits.begin() + static_cast<std::ptrdiff_t>(start), bits.begin() + static_cast<std::ptrdiff_t>(end),
                  label);
    }
}

InteractionProfile pool_majority(const InteractionProfile& profile, const PoolingConfig& cfg) {
    auto out = profile;
    pool_majority_in_place(out.bits, cfg);
    return out;
}

SessionProfiles classify_session(std::span<const DetectionRecord> records, const SessionManifest& manifest,
                                 Method method, const MlpModel* model, const PoolingConfig& cfg) {
    if (is_neural(method)) {
        if (model == nullptr) throw ConfigError("method '" + std::string(to_string(method)) + "' requires a trained model");
        return predict_session(*model, records, manifest, is_pooled(method), cfg);
    }
    SessionProfiles out{build_profile(records, manifest, HandSide::Left),
                        build_profile(records, manifest, HandSide::Right)};
    if (is_pooled(method)) {
        pool_majority_in_place(out.left.bits, cfg);
        pool_majority_in_place(out.right.bits, cfg);
    }
    return out;
}

std::string serialize_profile(const InteractionProfile& p, std::string_view input_hash) {
    std::string s = "handuse-profile 1\n";
    s += "participant_id " + p.participant_id + '\n';
    s += "session_id " + p.session_id + '\n';
    s += "hand_side " + std::string(to_string(p.hand_side)) + '\n';
    s += "fps " + text::exact(p.fps) + '\n';
    s += "frame_count " + std::to_string(p.bits.size()) + '\n';
    if (!input_hash.empty()) s += "input_hash " + std::string(input_hash) + '\n';
    std::size_t i = 0;
    while (i < p.bits.size()) {
        std::size_t j = i;
        while (j < p.bits.size() && p.bits[j] == p.bits[i]) ++j;
        s += std::to_string(p.bits[i]) + ',' + std::to_string(j - i) + '\n';
        i = j;
    }
    return s;
}

namespace {

std::string_view header_value(std::string_view line, std::string_view key, std::size_t line_no) {
    if (line.substr(0, key.size()) != key || line.size() <= key.size() || line[key.size()] != ' ')
        throw ParseError(line_no, "expected header '" + std::string(key) + "'");
    return text::trim(line.substr(key.size() + 1));
}

}  // namespace

InteractionProfile parse_profile(std::string_view body) {
    InteractionProfile p;
    std::int64_t frame_count = -1;
    bool header_done = false;
    int expect = 0;
    int last_value = -1;
    text::for_each_line(body, [&](std::size_t n, std::string_view line) {
        if (text::trim(line).empty()) return;
        if (!header_done) {
            switch (expect++) {
                case 0:
                    if (line != "handuse-profile 1") throw ParseError(n, "missing 'handuse-profile 1' magic line");
                    return;
                case 1: p.participant_id = std::string(header_value(line, "participant_id", n)); return;
                case 2: p.session_id = std::string(header_value(line, "session_id", n)); return;
                case 3: {
                    auto v = header_value(line, "hand_side", n);
                    if (v != "L" && v != "R") throw ValidationError("hand_side", "expected L or R");
                    p.hand_side = v == "L" ? HandSide::Left : HandSide::Right;
                    return;
                }
                case 4: {
                    auto v = text::to_double(header_value(line, "fps", n));
                    if (!v || !(*v > 0)) throw ValidationError("fps", "must be a number > 0");
                    p.fps = *v;
                    return;
                }
                case 5: {
                    auto v = text::to_int(header_value(line, "frame_count", n));
                    if (!v || *v <= 0) throw ValidationError("frame_count", "must be an integer > 0");
                    frame_count = *v;
                    p.bits.reserve(static_cast<std::size_t>(frame_count));
                    return;
                }
                default:
                    header_done = true;
                    if (line.substr(0, 11) == "input_hash ") return;
                    break;
            }
        }
        auto comma = line.find(',');
        if (comma == std::string_view::npos) throw ParseError(n, "expected '<value>,<length>'");
        auto value = text::to_int(text::trim(line.substr(0, comma)));
        auto length = text::to_int(text::trim(line.substr(comma + 1)));
        if (!value || (*value != 0 && *value != 1)) throw ParseError(n, "run value must be 0 or 1");
        if (!length || *length <= 0) throw ParseError(n, "run length must be a positive integer");
        if (*value == last_value) throw ParseError(n, "consecutive runs share a value");
        last_value = static_cast<int>(*value);
        if (static_cast<std::int64_t>(p.bits.size()) + *length > frame_count)
            throw RangeError("line " + std::to_string(n) + ": runs exceed frame_count");
        p.bits.insert(p.bits.end(), static_cast<std::size_t>(*length), static_cast<std::uint8_t>(*value));
    });
    if (expect < 6) throw ParseError(static_cast<std::size_t>(expect), "truncated profile header");
    if (static_cast<std::int64_t>(p.bits.size()) != frame_count)
        throw RangeError("runs cover " + std::to_string(p.bits.size()) + " frames, header says " +
                         std::to_string(frame_count));
    return p;
}

std::string profile_input_hash(std::string_view body) {
    std::string out;
    text::for_each_line(body, [&](std::size_t, std::string_view line) {
        if (out.empty() && line.substr(0, 11) == "input_hash ") out = std::string(text::trim(line.substr(11)));
    });
    return out;
}

}  // namespace handuse
