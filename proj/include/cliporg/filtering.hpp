#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cliporg/match_db.hpp"

namespace cliporg {

/// One candidate of a query's matching list after offset dedup: the best
/// offset's landmark count l, the candidate's total landmark count t_i, and
/// the matched fraction p = l / t_i.
struct MatchCandidate {
    std::string candidate_id;
    std::size_t candidate_index = 0;  // db insertion order
    std::int64_t offset_frames = 0;
    int l = 0;
    std::size_t t_i = 0;
    double p = 0.0;
};

/// Deduped matching list, sorted by p descending (ties: l descending, then
/// candidate insertion order). Each candidate appears at most once.
struct MatchingList {
    std::string query_id;
    std::vector<MatchCandidate> candidates;

    std::size_t n() const { return candidates.size(); }
};

struct FilterParams {
    int t_l = 5;          // minimum matching landmarks for a match
    double t_d = -0.07;   // slope threshold; a drop <= t_d marks the FP boundary

    // The drop rule's boundary sample: by default the sample the steep slope
    // leaves (s_j) is the last accepted one. With strict_drop_edge the steep
    // slope entering a sample rejects that sample as well.
    bool strict_drop_edge = false;
};

/// Why a matching-list entry was kept or cut.
enum class MatchFate {
    above_avg,              // accepted: p >= avg(p_1..p_n)
    below_avg_before_drop,  // accepted: below average, before any steep drop
    drop_edge,              // accepted: the sample the steep drop leaves
    after_drop,             // rejected by the slope rule
    dedup_loser,            // rejected: same candidate matched better at another offset
    filter_disabled,        // accepted because filtering was turned off
};

const char* to_string(MatchFate fate);

struct MatchDecision {
    MatchCandidate candidate;
    bool accepted = false;
    MatchFate fate = MatchFate::after_drop;
};

/// A query's filtered list plus the full decision trail (including dedup
/// losers) for reporting.
struct FilterResult {
    MatchingList accepted;
    std::vector<MatchDecision> decisions;
};

/// Collapses repeated candidates to their best offset group (max l; ties:
/// smaller |offset|, then smaller signed offset), attaches p = l / t_i with
/// t_i read from the candidate's stored fingerprint, and sorts by p
/// descending. Dedup losers, when requested, are appended to `losers`.
MatchingList dedupe_offsets(const RawMatchingList& raw, const MatchDb& db,
                            std::vector<MatchCandidate>* losers = nullptr);

/// The ordered p values (p_1 >= p_2 >= ... >= p_n) of a deduped list.
std::vector<double> percentages(const MatchingList& list);

/// The false-positive cut. With p sorted descending and avg their mean:
/// every candidate with p >= avg is accepted outright; the scan then walks
/// the below-average tail and stops at the first slope p_{i+1} - p_i <= t_d,
/// accepting the sample the drop leaves and rejecting everything after it
/// (see FilterParams::strict_drop_edge for the boundary variant). A list
/// with no steep drop is accepted whole; empty and single-entry lists pass
/// through unchanged.
MatchingList filter_matches(const MatchingList& deduped, const FilterParams& params);

/// dedupe_offsets + filter_matches with the per-entry decision trail.
FilterResult filter_list(const RawMatchingList& raw, const MatchDb& db,
                         const FilterParams& params);

/// Accepts every offset group unfiltered (the --no-filter path). Repeated
/// candidates stay in the decision trail; downstream graph construction
/// resolves them per pair.
FilterResult passthrough_list(const RawMatchingList& raw, const MatchDb& db);

/// Per-query filtering over the whole database, in query order.
std::vector<FilterResult> filter_all(const std::vector<RawMatchingList>& raw_lists,
                                     const MatchDb& db, const FilterParams& params,
                                     bool filtering_enabled = true);

}  // namespace cliporg
