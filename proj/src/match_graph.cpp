#include "cliporg/match_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

#include "cliporg/errors.hpp"

namespace cliporg {

namespace {

/// One direction's contribution to an edge: the offset already oriented as
/// position(b) - position(a) for a < b.
struct Contribution {
    double offset_s = 0.0;
    std::int64_t oriented_frames = 0;
    int l = 0;
    std::size_t query;  // which endpoint's list produced it
};

}  // namespace

MatchGraph build_graph(const std::vector<FilterResult>& filtered, const MatchDb& db,
                       const StftParams& stft, int analysis_rate) {
    MatchGraph g;
    g.vertex_ids = db.ids();
    g.frame_duration_s = static_cast<double>(stft.hop_size) / analysis_rate;
    g.adjacency.assign(g.vertex_ids.size(), {});

    std::map<std::pair<std::size_t, std::size_t>, std::vector<Contribution>> pairs;
    for (const FilterResult& result : filtered) {
        if (result.accepted.candidates.empty()) continue;
        const std::size_t q = db.index_of(result.accepted.query_id);
        for (const MatchCandidate& c : result.accepted.candidates) {
            const std::size_t t = c.candidate_index;
            if (t == q) continue;
            const std::size_t a = std::min(q, t);
            const std::size_t b = std::max(q, t);
            // offset_frames = t1_query - t1_candidate, i.e. the candidate's
            // start relative to the query's. Orient as b relative to a.
            const std::int64_t oriented =
                (q == a) ? c.offset_frames : -c.offset_frames;
            pairs[{a, b}].push_back({offset_seconds(oriented, stft, analysis_rate),
                                     oriented, c.l, q});
        }
    }

    for (auto& [key, contributions] : pairs) {
        const auto [a, b] = key;
        std::stable_sort(contributions.begin(), contributions.end(),
                         [](const Contribution& x, const Contribution& y) {
                             if (x.l != y.l) return x.l > y.l;
                             if (x.query != y.query) return x.query < y.query;
                             return x.oriented_frames < y.oriented_frames;
                         });
        const Contribution& best = contributions.front();

        for (const Contribution& other : contributions) {
            if (std::llabs(other.oriented_frames - best.oriented_frames) > 2) {
                std::ostringstream msg;
                msg << "inconsistent offsets for edge {" << g.vertex_ids[a] << ", "
                    << g.vertex_ids[b] << "}: kept " << best.offset_s << " s (l="
                    << best.l << "), dropped " << other.offset_s << " s (l="
                    << other.l << ")";
                g.warnings.push_back(msg.str());
                break;
            }
        }

        const std::size_t edge_idx = g.edges.size();
        g.edges.push_back({a, b, best.offset_s, best.l});
        g.adjacency[a].push_back(edge_idx);
        g.adjacency[b].push_back(edge_idx);
    }
    return g;
}

ClusterSet connected_components(const MatchGraph& graph) {
    const std::size_t n = graph.vertex_ids.size();
    ClusterSet out;
    std::vector<bool> visited(n, false);

    for (std::size_t start = 0; start < n; ++start) {
        if (visited[start]) continue;
        std::vector<std::size_t> component;
        std::queue<std::size_t> frontier;
        frontier.push(start);
        visited[start] = true;
        while (!frontier.empty()) {
            const std::size_t v = frontier.front();
            frontier.pop();
            component.push_back(v);
            for (const std::size_t e : graph.adjacency[v]) {
                const std::size_t w = graph.other_end(e, v);
                if (!visited[w]) {
                    visited[w] = true;
                    frontier.push(w);
                }
            }
        }
        std::sort(component.begin(), component.end());
        if (component.size() >= 2)
            out.clusters.push_back(std::move(component));
        else
            out.unmatched.push_back(component.front());
    }
    return out;
}

std::vector<double> propagate_offsets(const MatchGraph& graph,
                                      const std::vector<std::size_t>& cluster,
                                      std::vector<std::string>* warnings) {
    std::map<std::size_t, double> position;
    if (cluster.empty()) return {};

    // BFS from the first member; neighbours in adjacency (insertion) order.
    std::queue<std::size_t> frontier;
    position[cluster.front()] = 0.0;
    frontier.push(cluster.front());
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop();
        for (const std::size_t e : graph.adjacency[v]) {
            const GraphEdge& edge = graph.edges[e];
            const std::size_t w = graph.other_end(e, v);
            // edge.offset_s = position(edge.b) - position(edge.a)
            const double implied = (v == edge.a) ? position[v] + edge.offset_s
                                                 : position[v] - edge.offset_s;
            auto it = position.find(w);
            if (it == position.end()) {
                position[w] = implied;
                frontier.push(w);
            } else if (std::abs(it->second - implied) > 2.0 * graph.frame_duration_s) {
                if (warnings) {
                    std::ostringstream msg;
                    msg << "offset cycle disagreement at " << graph.vertex_ids[w]
                        << ": " << it->second << " s vs " << implied << " s";
                    warnings->push_back(msg.str());
                }
            }
        }
    }

    double min_pos = std::numeric_limits<double>::infinity();
    for (const std::size_t v : cluster) {
        if (!position.count(v))
            throw RangeError("propagate_offsets: cluster is not connected");
        min_pos = std::min(min_pos, position[v]);
    }

    std::vector<double> out;
    out.reserve(cluster.size());
    for (const std::size_t v : cluster) out.push_back(position[v] - min_pos);
    return out;
}

}  // namespace cliporg
