#include "handuse/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "handuse/error.hpp"

namespace fs = std::filesystem;

namespace handuse {

std::vector<std::string> Dataset::participants() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& s : sessions)
        if (seen.insert(s.manifest.participant_id).second) out.push_back(s.manifest.participant_id);
    return out;
}

std::vector<std::string> Dataset::annotated_participants() const {
    std::set<std::string> annotated;
    for (const auto& a : annotations) annotated.insert(a.participant_id);
    std::vector<std::string> out;
    for (const auto& id : participants())
        if (annotated.count(id)) out.push_back(id);
    return out;
}

std::map<std::string, ParticipantProfile> Dataset::participant_profiles() const {
    std::map<std::string, ParticipantProfile> out;
    for (const auto& s : sessions) {
        auto p = participant_profile(s.manifest);
        auto [it, inserted] = out.try_emplace(p.participant_id, p);
        if (!inserted && !(it->second == p))
            throw ValidationError("dominant_side_post_injury",
                                  "sessions of '" + p.participant_id + "' disagree on hand dominance");
    }
    return out;
}

std::vector<std::string> list_manifests(const std::string& path) {
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) return {path};
    if (!fs::is_directory(path, ec)) throw InputError("manifest path '" + path + "' does not exist");
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(path))
        if (entry.is_regular_file() && entry.path().extension() == ".manifest") out.push_back(entry.path().string());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw InputError("no *.manifest files in '" + path + "'");
    return out;
}

std::string detections_path_for(const std::string& manifest_path, const std::string& detections_dir) {
    return (fs::path(detections_dir) / fs::path(manifest_path).stem()).string() + ".det";
}

Session load_session(const std::string& manifest_path, const std::string& detections_dir) {
    Session s;
    auto in_file = [](const std::string& path, auto&& fn) {
        try {
            fn();
        } catch (const ValidationError& e) {
            throw ValidationError(e.field(), path + ": " + e.detail());
        } catch (const ParseError& e) {
            throw ParseError(e.line(), path + ": " + e.detail());
        } catch (const RangeError& e) {
            throw RangeError(path + ": " + e.what());
        }
    };
    in_file(manifest_path, [&] { s.manifest = parse_manifest(read_file(manifest_path)); });
    const auto det_path = detections_path_for(manifest_path, detections_dir);
    in_file(det_path, [&] { s.detections = dedupe_per_frame(parse_detections(read_file(det_path), s.manifest)); });
    return s;
}

}  // namespace handuse
