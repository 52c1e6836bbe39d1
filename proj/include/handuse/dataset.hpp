#pragma once

#include <map>
#include <string>
#include <vector>

#include "handuse/ingest.hpp"

namespace handuse {

/// One recording session with its validated, deduplicated detections.
struct Session {
    SessionManifest manifest;
    std::vector<DetectionRecord> detections;
};

struct Dataset {
    std::vector<Session> sessions;
    std::vector<AnnotationRecord> annotations;
    std::vector<ClinicalRecord> clinical;

    /// Participant ids in first-appearance order over sessions.
    std::vector<std::string> participants() const;
    /// Participants with at least one annotation, in first-appearance order over sessions.
    std::vector<std::string> annotated_participants() const;
    /// Post-injury dominance per participant; throws ValidationError if sessions disagree.
    std::map<std::string, ParticipantProfile> participant_profiles() const;
};

/// Manifest files: `path` itself, or every `*.manifest` in the directory sorted by name.
std::vector<std::string> list_manifests(const std::string& path);

/// Detections for `<dir>/<stem>.manifest` live in `<detections_dir>/<stem>.det`.
std::string detections_path_for(const std::string& manifest_path, const std::string& detections_dir);

Session load_session(const std::string& manifest_path, const std::string& detections_dir);

}  // namespace handuse
