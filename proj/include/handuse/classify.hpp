#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "handuse/ingest.hpp"

namespace handuse {

class MlpModel;

/// Per-hand binary time series; bits[f] == 1 means functional interaction in frame f.
struct InteractionProfile {
    std::string participant_id;
    std::string session_id;
    HandSide hand_side = HandSide::Left;
    double fps = 30.0;
    std::vector<std::uint8_t> bits;
    bool operator==(const InteractionProfile&) const = default;
};

enum class TiePolicy : std::uint8_t { ZeroOnTie, OneOnTie };

struct PoolingConfig {
    std::int64_t window = 30;  // frames; 30 frames = 1 s at 30 fps
    TiePolicy tie_policy = TiePolicy::ZeroOnTie;
};

enum class Method : std::uint8_t { StateFrame, StatePool, ShanAnn, ShanAnnPool };

std::string_view to_string(Method method);
/// Accepts the CLI spellings: state-frame, state-pool, ann, ann-pool.
Method parse_method(std::string_view name);
bool is_pooled(Method method);
bool is_neural(Method method);

/// Contact with a portable or non-portable object counts as functional interaction.
constexpr std::uint8_t classify_frame_by_state(ContactState state) {
    return state == ContactState::NonPortableObject || state == ContactState::PortableObject ? 1 : 0;
}

/// Rule-based profile for one hand. Frames without a record for `side` score 0.
/// Records must already be deduplicated and belong to the manifest's session.
InteractionProfile build_profile(std::span<const DetectionRecord> records, const SessionManifest& manifest,
                                 HandSide side);

/// Majority vote over consecutive blocks of `cfg.window` frames, re-expanded so every
/// frame of a block carries the block label. The final block may be shorter and votes
/// over its own length.
InteractionProfile pool_majority(const InteractionProfile& profile, const PoolingConfig& cfg);
void pool_majority_in_place(std::vector<std::uint8_t>& bits, const PoolingConfig& cfg);

struct SessionProfiles {
    InteractionProfile left;
    InteractionProfile right;
    const InteractionProfile& for_side(HandSide side) const { return side == HandSide::Left ? left : right; }
};

/// Dispatches to the contact-state rule or the neural classifier; pooling applies
/// to the *Pool variants. Neural methods throw ConfigError when `model` is null.
SessionProfiles classify_session(std::span<const DetectionRecord> records, const SessionManifest& manifest,
                                 Method method, const MlpModel* model, const PoolingConfig& cfg);

// Run-length text format:
//   handuse-profile 1
//   participant_id <id>
//   session_id <id>
//   hand_side <L|R>
//   fps <number>
//   frame_count <n>
//   [input_hash <hex>]
//   <value>,<length>     (one run per line, alternating values, lengths > 0)
std::string serialize_profile(const InteractionProfile& profile, std::string_view input_hash = {});
InteractionProfile parse_profile(std::string_view text);
/// Returns the input_hash header of a serialized profile, or empty when absent.
std::string profile_input_hash(std::string_view text);

}  // namespace handuse
