#include "cliporg/filtering.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>

#include "cliporg/errors.hpp"

namespace cliporg {

const char* to_string(MatchFate fate) {
    switch (fate) {
        case MatchFate::above_avg: return "above_avg";
        case MatchFate::below_avg_before_drop: return "below_avg_before_drop";
        case MatchFate::drop_edge: return "drop_edge";
        case MatchFate::after_drop: return "after_drop";
        case MatchFate::dedup_loser: return "dedup_loser";
        case MatchFate::filter_disabled: return "filter_disabled";
    }
    return "unknown";
}

namespace {

MatchCandidate to_candidate(const OffsetGroup& g, const MatchDb& db) {
    MatchCandidate c;
    c.candidate_id = g.candidate_id;
    c.candidate_index = g.candidate_index;
    c.offset_frames = g.offset_frames;
    c.l = g.l;
    c.t_i = db.fingerprint(g.candidate_index).total_landmarks();
    c.p = c.t_i > 0 ? static_cast<double>(g.l) / static_cast<double>(c.t_i) : 0.0;
    return c;
}

bool better_offset_group(const OffsetGroup& a, const OffsetGroup& b) {
    if (a.l != b.l) return a.l > b.l;
    const auto abs_a = std::abs(a.offset_frames);
    const auto abs_b = std::abs(b.offset_frames);
    if (abs_a != abs_b) return abs_a < abs_b;
    return a.offset_frames < b.offset_frames;
}

}  // namespace

MatchingList dedupe_offsets(const RawMatchingList& raw, const MatchDb& db,
                            std::vector<MatchCandidate>* losers) {
    // best group per candidate, in candidate insertion order
    std::map<std::size_t, OffsetGroup> best;
    for (const OffsetGroup& g : raw.groups) {
        auto [it, inserted] = best.emplace(g.candidate_index, g);
        if (!inserted && better_offset_group(g, it->second)) it->second = g;
    }
    if (losers) {
        for (const OffsetGroup& g : raw.groups) {
            const OffsetGroup& winner = best.at(g.candidate_index);
            if (g.offset_frames != winner.offset_frames || g.l != winner.l)
                losers->push_back(to_candidate(g, db));
        }
    }

    MatchingList list;
    list.query_id = raw.query_id;
    list.candidates.reserve(best.size());
    for (const auto& [index, group] : best) list.candidates.push_back(to_candidate(group, db));
    std::sort(list.candidates.begin(), list.candidates.end(),
              [](const MatchCandidate& a, const MatchCandidate& b) {
                  if (a.p != b.p) return a.p > b.p;
                  if (a.l != b.l) return a.l > b.l;
                  return a.candidate_index < b.candidate_index;
              });
    return list;
}

std::vector<double> percentages(const MatchingList& list) {
    std::vector<double> out;
    out.reserve(list.n());
    for (const auto& c : list.candidates) out.push_back(c.p);
    return out;
}

namespace {

/// Per-index fate of a p-sorted list. A non-empty list never loses its
/// first element: the maximum is never below the mean.
std::vector<MatchFate> classify(const std::vector<double>& p, const FilterParams& params) {
    const std::size_t n = p.size();
    std::vector<MatchFate> fates(n, MatchFate::after_drop);
    if (n == 0) return fates;

    const double avg = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(n);

    // p is sorted descending, so the candidates with p >= avg form a prefix.
    // Mathematically the maximum is never below the mean; summation rounding
    // can contradict that for all-equal lists, so the head is forced in.
    std::size_t k = 0;
    while (k < n && p[k] >= avg) ++k;
    if (k == 0) k = 1;
    for (std::size_t i = 0; i < k; ++i) fates[i] = MatchFate::above_avg;

    if (!params.strict_drop_edge) {
        // Accept s_i while walking; the first slope <= t_d makes its sample
        // the last accepted one.
        for (std::size_t i = k; i < n; ++i) {
            fates[i] = MatchFate::below_avg_before_drop;
            if (i + 1 < n && p[i + 1] - p[i] <= params.t_d) {
                fates[i] = MatchFate::drop_edge;
                break;  // everything after i stays after_drop
            }
        }
    } else {
        // Variant: the slope entering a sample (including the one crossing
        // the average boundary) rejects that sample and the rest.
        for (std::size_t i = k; i < n; ++i) {
            if (p[i] - p[i - 1] <= params.t_d) break;
            fates[i] = MatchFate::below_avg_before_drop;
        }
    }
    return fates;
}

}  // namespace

MatchingList filter_matches(const MatchingList& deduped, const FilterParams& params) {
    const std::vector<MatchFate> fates = classify(percentages(deduped), params);
    MatchingList out;
    out.query_id = deduped.query_id;
    for (std::size_t i = 0; i < deduped.n(); ++i) {
        const bool accepted = fates[i] != MatchFate::after_drop;
        if (!accepted) break;  // the accepted set is a prefix
        out.candidates.push_back(deduped.candidates[i]);
    }
    return out;
}

FilterResult filter_list(const RawMatchingList& raw, const MatchDb& db,
                         const FilterParams& params) {
    FilterResult result;
    std::vector<MatchCandidate> losers;
    const MatchingList deduped = dedupe_offsets(raw, db, &losers);
    const std::vector<MatchFate> fates = classify(percentages(deduped), params);

    result.accepted.query_id = raw.query_id;
    for (std::size_t i = 0; i < deduped.n(); ++i) {
        const bool accepted = fates[i] != MatchFate::after_drop;
        result.decisions.push_back({deduped.candidates[i], accepted, fates[i]});
        if (accepted) result.accepted.candidates.push_back(deduped.candidates[i]);
    }
    for (const MatchCandidate& loser : losers)
        result.decisions.push_back({loser, false, MatchFate::dedup_loser});
    return result;
}

FilterResult passthrough_list(const RawMatchingList& raw, const MatchDb& db) {
    FilterResult result;
    result.accepted.query_id = raw.query_id;
    for (const OffsetGroup& g : raw.groups) {
        MatchCandidate c = to_candidate(g, db);
        result.decisions.push_back({c, true, MatchFate::filter_disabled});
        result.accepted.candidates.push_back(std::move(c));
    }
    return result;
}

std::vector<FilterResult> filter_all(const std::vector<RawMatchingList>& raw_lists,
                                     const MatchDb& db, const FilterParams& params,
                                     bool filtering_enabled) {
    std::vector<FilterResult> out;
    out.reserve(raw_lists.size());
    for (const RawMatchingList& raw : raw_lists)
        out.push_back(filtering_enabled ? filter_list(raw, db, params)
                                        : passthrough_list(raw, db));
    return out;
}

}  // namespace cliporg
