#include "cliporg/quality.hpp"

#include <algorithm>
#include <numeric>

namespace cliporg {

long long score_proposed(const MatchGraph& graph, std::size_t vertex) {
    long long score = 0;
    for (const std::size_t e : graph.adjacency[vertex]) score += graph.edges[e].evidence_l;
    return score;
}

int score_km(const MatchGraph& graph, std::size_t vertex) {
    return static_cast<int>(graph.degree(vertex));
}

std::vector<QualityScore> rank_cluster(const MatchGraph& graph,
                                       const std::vector<std::size_t>& cluster) {
    std::vector<QualityScore> scores;
    scores.reserve(cluster.size());
    for (const std::size_t v : cluster) {
        QualityScore s;
        s.sample_id = graph.vertex_ids[v];
        s.vertex = v;
        s.proposed_score = score_proposed(graph, v);
        s.km_score = score_km(graph, v);
        scores.push_back(std::move(s));
    }

    // proposed ranking: exact positions, insertion order breaking ties
    std::sort(scores.begin(), scores.end(), [](const QualityScore& a, const QualityScore& b) {
        if (a.proposed_score != b.proposed_score) return a.proposed_score > b.proposed_score;
        return a.vertex < b.vertex;
    });
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i].rank_proposed = static_cast<int>(i + 1);
        const bool ties_prev = i > 0 && scores[i - 1].proposed_score == scores[i].proposed_score;
        const bool ties_next =
            i + 1 < scores.size() && scores[i + 1].proposed_score == scores[i].proposed_score;
        scores[i].proposed_tie = ties_prev || ties_next;
    }

    // neighbour-count ranking: equal scores share a rank range
    std::vector<std::size_t> by_km(scores.size());
    std::iota(by_km.begin(), by_km.end(), 0);
    std::sort(by_km.begin(), by_km.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a].km_score != scores[b].km_score)
            return scores[a].km_score > scores[b].km_score;
        return scores[a].vertex < scores[b].vertex;
    });
    std::size_t i = 0;
    while (i < by_km.size()) {
        std::size_t j = i;
        while (j + 1 < by_km.size() &&
               scores[by_km[j + 1]].km_score == scores[by_km[i]].km_score)
            ++j;
        for (std::size_t k = i; k <= j; ++k) {
            scores[by_km[k]].km_rank_lo = static_cast<int>(i + 1);
            scores[by_km[k]].km_rank_hi = static_cast<int>(j + 1);
        }
        i = j + 1;
    }
    return scores;
}

}  // namespace cliporg
