#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cliporg/corpus.hpp"
#include "cliporg/filtering.hpp"
#include "cliporg/fingerprint.hpp"
#include "cliporg/match_db.hpp"
#include "cliporg/match_graph.hpp"
#include "cliporg/quality.hpp"
#include "cliporg/reports.hpp"

namespace cliporg {

/// Everything the pipeline needs, with the defaults used throughout.
struct PipelineConfig {
    int analysis_rate = 11025;
    StftParams stft;       // 512 / 256, Hann
    PeakParams peaks;      // +-10 frames x +-15 bins, top 5 per frame
    PairingParams pairing; // fan-out 3, dt <= 63 frames, |df| <= 31 bins
    FilterParams filter;   // t_l = 5, t_d = -0.07
    unsigned jobs = 0;     // worker threads; 0 = one per core

    void validate() const;  // throws RangeError on out-of-range combinations
    FingerprintParams fingerprint_params() const;
    double frame_duration_s() const {
        return static_cast<double>(stft.hop_size) / analysis_rate;
    }
};

struct IngestStats {
    std::size_t files_seen = 0;
    std::size_t ingested = 0;
    std::size_t failed = 0;
    std::size_t total_landmarks = 0;
};

/// Decodes, canonicalises, fingerprints and inserts every *.wav in dir
/// (sorted by filename; the sort order is the db insertion order).
/// Files that fail to decode are reported to log and skipped.
IngestStats ingest_directory(const std::filesystem::path& dir, const PipelineConfig& config,
                             MatchDb& db, std::ostream& log);

struct OrganiseOptions {
    bool filtering_enabled = true;
    InjectionCounts injections;
    std::uint64_t inject_seed = 1;
    /// Ground truth, when available: required for injections, and used to
    /// flag reference clips in the rankings.
    std::optional<GroundTruthManifest> manifest;
};

struct OrganiseResult {
    std::vector<RawMatchingList> raw_lists;  // post-injection when injecting
    std::vector<FilterResult> filtered;
    MatchGraph graph;
    ClusterSet clusters;
    std::vector<std::vector<double>> positions;       // per cluster
    std::vector<std::vector<QualityScore>> rankings;  // per cluster
    InjectionOutcome injections;
    std::optional<GroundTruthManifest> updated_manifest;
};

/// query-all -> (inject) -> filter -> graph -> components -> positions ->
/// rankings. Deterministic for a given db and options, whatever the job
/// count.
OrganiseResult organise(const MatchDb& db, const PipelineConfig& config,
                        const OrganiseOptions& options);

/// Writes clusters.json, rankings.json, rankings.csv, graph.csv and
/// filter_decisions.json (plus manifest.json when injection updated one)
/// into out_dir.
void write_organise_reports(const OrganiseResult& result, const PipelineConfig& config,
                            bool filtering_enabled, const std::filesystem::path& out_dir);

}  // namespace cliporg
