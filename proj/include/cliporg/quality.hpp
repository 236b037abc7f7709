#pragma once

#include <string>
#include <vector>

#include "cliporg/match_graph.hpp"

namespace cliporg {

/// Per-sample quality evidence inside one cluster. proposed_score sums the
/// matching-landmark counts of the sample's accepted matches; km_score is
/// the plain neighbour count. Neighbour-count ties share a rank range
/// [km_rank_lo, km_rank_hi]; proposed ties get exact positions plus a flag.
struct QualityScore {
    std::string sample_id;
    std::size_t vertex = 0;
    long long proposed_score = 0;
    int rank_proposed = 0;
    bool proposed_tie = false;
    int km_score = 0;
    int km_rank_lo = 0;
    int km_rank_hi = 0;
    bool is_reference = false;  // filled from a ground-truth manifest when known
};

/// Sum of edge evidence over the vertex's accepted matches (each neighbour
/// counted once). Unmatched samples score 0.
long long score_proposed(const MatchGraph& graph, std::size_t vertex);

/// Vertex degree.
int score_km(const MatchGraph& graph, std::size_t vertex);

/// Scores and ranks one cluster; output ordered by proposed rank.
std::vector<QualityScore> rank_cluster(const MatchGraph& graph,
                                       const std::vector<std::size_t>& cluster);

}  // namespace cliporg
