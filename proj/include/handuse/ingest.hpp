#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace handuse {

enum class HandSide : std::uint8_t { Left, Right };

/// Upstream detector's 5-way contact label; numeric values are part of the file format.
enum class ContactState : std::uint8_t {
    NoContact = 0,
    SelfContact = 1,
    OtherPerson = 2,
    NonPortableObject = 3,
    PortableObject = 4,
};

struct BoundingBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // fractions of frame width/height
    bool operator==(const BoundingBox&) const = default;
};

struct HandOffset {
    double dx = 0, dy = 0;
    double magnitude = 0;  // fraction of frame diagonal
    bool operator==(const HandOffset&) const = default;
};

/// One detected hand in one frame.
struct DetectionRecord {
    std::string participant_id;
    std::string session_id;
    std::int64_t frame_index = 0;
    HandSide hand_side = HandSide::Left;
    BoundingBox bbox;
    double confidence = 0;
    ContactState contact_state = ContactState::NoContact;
    HandOffset offset;
    bool operator==(const DetectionRecord&) const = default;
};

struct SessionManifest {
    std::string participant_id;
    std::string session_id;
    double fps = 30.0;
    std::int64_t frame_count = 0;
    int frame_width = 720;
    int frame_height = 405;
    HandSide dominant_side_post_injury = HandSide::Right;
    HandSide dominant_side_pre_injury = HandSide::Right;
    bool operator==(const SessionManifest&) const = default;
};

struct ParticipantProfile {
    std::string participant_id;
    HandSide dominant_side_post_injury = HandSide::Right;
    HandSide dominant_side_pre_injury = HandSide::Right;
    bool operator==(const ParticipantProfile&) const = default;
};

struct AnnotationRecord {
    std::string participant_id;
    std::string session_id;
    std::int64_t frame_index = 0;
    HandSide hand_side = HandSide::Left;
    std::uint8_t label = 0;
    bool operator==(const AnnotationRecord&) const = default;
};

/// GRASSP subscores for one hand. No upper bounds are enforced.
struct GrasspScores {
    std::optional<double> strength;
    std::optional<double> sens_dorsal;
    std::optional<double> sens_palmar;
    std::optional<double> sens_total;
    std::optional<double> prehension_ability;
    std::optional<double> prehension_performance;
    std::optional<double> total;
    bool operator==(const GrasspScores&) const = default;
};

/// Clinical scores of one participant. Absent values stay absent; nothing is imputed.
/// Hands are named relative to post-injury dominance.
struct ClinicalRecord {
    std::string participant_id;
    std::optional<double> uems_dominant;
    std::optional<double> uems_nondominant;
    std::optional<double> uems_total;
    GrasspScores grassp_dominant;
    GrasspScores grassp_nondominant;
    std::optional<double> scim_self_care;
    std::optional<double> scim_respiration_sphincter;
    std::optional<double> scim_mobility;
    std::optional<double> scim_total;
    bool operator==(const ClinicalRecord&) const = default;
};

std::string_view to_string(HandSide side);
HandSide opposite(HandSide side);

// Detection stream: one comma-separated record per line, fields in order
// participant_id,session_id,frame_index,hand_side,x1,y1,x2,y2,confidence,
// contact_state,dx,dy,magnitude. Blank lines and lines starting with '#' are skipped.
std::vector<DetectionRecord> parse_detections(std::string_view text, const SessionManifest& manifest);
void validate(const DetectionRecord& record);
std::string serialize_detection(const DetectionRecord& record);
std::string serialize_detections(std::span<const DetectionRecord> records);

/// Keeps at most one record per (frame, hand): the most confident, first one on ties.
/// Survivors keep their relative input order.
std::vector<DetectionRecord> dedupe_per_frame(std::span<const DetectionRecord> records);

SessionManifest parse_manifest(std::string_view text);
std::string serialize_manifest(const SessionManifest& manifest);
ParticipantProfile participant_profile(const SessionManifest& manifest);

std::vector<AnnotationRecord> parse_annotations(std::string_view text);
std::string serialize_annotations(std::span<const AnnotationRecord> records);

std::vector<ClinicalRecord> parse_clinical(std::string_view text);
void validate(const ClinicalRecord& record);
std::string serialize_clinical(std::span<const ClinicalRecord> records);

/// Reads a whole file; throws InputError if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace handuse
