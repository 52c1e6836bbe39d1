#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "handuse/classify.hpp"
#include "handuse/ingest.hpp"

namespace handuse {

/// Maximal run of 1-bits as a half-open frame interval [start_frame, end_frame).
struct InteractionEvent {
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;
    double duration_s = 0;
    bool operator==(const InteractionEvent&) const = default;
};

/// Perc / Dur / Num for one hand.
struct HandUseMeasures {
    double perc = 0;          // fraction of recording time in [0,1]
    double dur_s = 0;         // mean event duration
    double num_per_hour = 0;  // events per hour
    std::int64_t event_count = 0;
    double total_time_s = 0;
    double interaction_time_s = 0;
    /// No events; dur_s is reported as 0.
    bool empty = true;
};

/// Perc averaged across hands, Dur and Num summed.
struct BilateralMeasures {
    double perc_bi = 0;
    double dur_bi_s = 0;
    double num_bi_per_hour = 0;
};

struct SessionMeasures {
    HandUseMeasures dominant;
    HandUseMeasures nondominant;
    BilateralMeasures bilateral;
};

struct ParticipantMeasures {
    std::string participant_id;
    HandUseMeasures dominant;
    HandUseMeasures nondominant;
    BilateralMeasures bilateral;
};

std::vector<InteractionEvent> extract_events(const InteractionProfile& profile);

/// Throws ArgumentError on an empty profile or non-positive fps.
HandUseMeasures compute_measures(const InteractionProfile& profile);

BilateralMeasures bilateral(const HandUseMeasures& dominant, const HandUseMeasures& nondominant);

/// Maps Left/Right onto dominant/non-dominant using the post-injury dominant side.
SessionMeasures compute_session_measures(const InteractionProfile& left, const InteractionProfile& right,
                                         const ParticipantProfile& participant);

/// Pools sessions by summing interaction time, event counts and recording time before
/// forming the ratios, i.e. weighting each session by its duration.
HandUseMeasures aggregate_participant(std::span<const HandUseMeasures> sessions);

// Measures table: participant_id,hand,perc,dur_s,num_per_hour,event_count,total_time_s,empty_flag
// with hand in {dom, nondom, bilateral}. Reals carry 6 significant digits. The bilateral row
// reports summed event counts, the shared recording time, and empty_flag = both hands empty.
std::string serialize_measures_table(std::span<const ParticipantMeasures> rows);
std::vector<ParticipantMeasures> parse_measures_table(std::string_view text);

}  // namespace handuse
