#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cliporg/corpus.hpp"
#include "cliporg/filtering.hpp"
#include "cliporg/match_graph.hpp"
#include "cliporg/quality.hpp"

namespace cliporg {

inline constexpr int kReportSchemaVersion = 1;

// clusters.json: clusters as arrays of {sample_id, timeline_position_s},
// plus the unmatched samples and any offset-consistency warnings.
void write_clusters_json(const std::filesystem::path& path, const MatchGraph& graph,
                         const ClusterSet& clusters,
                         const std::vector<std::vector<double>>& positions);

// rankings.json / rankings.csv: per-cluster quality entries ordered by
// proposed rank.
void write_rankings_json(const std::filesystem::path& path,
                         const std::vector<std::vector<QualityScore>>& rankings);
void write_rankings_csv(const std::filesystem::path& path,
                        const std::vector<std::vector<QualityScore>>& rankings);

// graph.csv: edge list a,b,offset_s,l_ab (a and b in insertion order).
void write_graph_csv(const std::filesystem::path& path, const MatchGraph& graph);

// filter_decisions.json: per query, every considered candidate with
// (l, t_i, p, offset, accepted, reason).
void write_filter_decisions_json(const std::filesystem::path& path,
                                 const std::vector<FilterResult>& filtered,
                                 const FilterParams& params, bool filtering_enabled,
                                 double frame_duration_s);

struct RemovalStats {
    int injected = 0;
    int removed = 0;
    double rate() const { return injected > 0 ? static_cast<double>(removed) / injected : 1.0; }
};

struct ReferenceRank {
    std::string song_id;
    std::string sample_id;
    int cluster_id = -1;
    int cluster_size = 0;
    int rank_proposed = 0;
    bool proposed_tie = false;
    int km_rank_lo = 0;
    int km_rank_hi = 0;
};

/// Evaluation of an organise run against the ground truth.
struct Metrics {
    int n_clusters = 0;
    int n_unmatched = 0;
    double purity = 1.0;          // size-weighted dominant-song share
    int wrongly_merged = 0;       // clusters spanning more than one song
    int wrongly_split = 0;        // songs spanning more than one cluster
    bool filtering_enabled = true;

    RemovalStats sample_level_fp;
    RemovalStats landmark_level_fp;

    int true_matches_listed = 0;   // same-song candidates in the deduped lists
    int true_matches_accepted = 0;
    int true_matches_rejected = 0;
    double false_negative_rate = 0.0;
    int cross_song_listed = 0;     // non-injected matches bridging songs (isolation violations)
    int cross_song_accepted = 0;   // ... of which the filter accepted

    double offset_tolerance_s = 0.0;  // two frame durations
    int offsets_checked = 0;
    int offsets_within_tolerance = 0;
    double max_offset_error_s = 0.0;

    std::vector<ReferenceRank> reference_ranks;
    int reference_rank1_proposed = 0;  // clusters where the reference tops the proposed ranking
    int km_tie_groups = 0;             // rank ranges shared by >= 2 samples
    int proposed_tie_groups = 0;

    std::string to_json() const;
    void print(std::ostream& out) const;
};

/// Reads the organise reports back from disk, validates their schema
/// versions and id sets against the manifest (unknown or missing ids raise
/// InputError listing the orphans), and computes the metrics.
Metrics evaluate_reports(const std::filesystem::path& reports_dir,
                         const GroundTruthManifest& manifest);

void write_metrics_json(const std::filesystem::path& path, const Metrics& metrics);

}  // namespace cliporg
