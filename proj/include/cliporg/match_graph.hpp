#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cliporg/filtering.hpp"

namespace cliporg {

/// Undirected edge between vertices a < b (db insertion order). offset_s is
/// the timeline position of b minus the position of a, in seconds;
/// evidence_l is the strongest matching-landmark count that produced the
/// edge.
struct GraphEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double offset_s = 0.0;
    int evidence_l = 0;
};

/// Vertices are every db sample (matched or not); edges are accepted
/// matches. An edge exists if either endpoint listed the other (union
/// semantics), so one surviving direction is enough.
struct MatchGraph {
    std::vector<std::string> vertex_ids;            // insertion order
    std::vector<GraphEdge> edges;                   // sorted by (a, b)
    std::vector<std::vector<std::size_t>> adjacency;  // vertex -> edge indices
    double frame_duration_s = 0.0;                  // offset consistency unit
    std::vector<std::string> warnings;

    std::size_t degree(std::size_t v) const { return adjacency[v].size(); }
    const GraphEdge& edge(std::size_t idx) const { return edges[idx]; }
    std::size_t other_end(std::size_t edge_idx, std::size_t v) const {
        const GraphEdge& e = edges[edge_idx];
        return e.a == v ? e.b : e.a;
    }
};

/// Components of the match graph: clusters (>= 2 members each) and the
/// isolated vertices, both in insertion order.
struct ClusterSet {
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> unmatched;
};

MatchGraph build_graph(const std::vector<FilterResult>& filtered, const MatchDb& db,
                       const StftParams& stft, int analysis_rate);

ClusterSet connected_components(const MatchGraph& graph);

/// Timeline positions (seconds) for one cluster, aligned with the member
/// order; the earliest member sits at 0. Offsets accumulate over a BFS
/// spanning tree; non-tree edges disagreeing by more than two frame
/// durations append warnings.
std::vector<double> propagate_offsets(const MatchGraph& graph,
                                      const std::vector<std::size_t>& cluster,
                                      std::vector<std::string>* warnings = nullptr);

}  // namespace cliporg
