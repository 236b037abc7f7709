#include "cliporg/pipeline.hpp"

#include <algorithm>
#include <ostream>

#include "cliporg/errors.hpp"
#include "cliporg/parallel.hpp"
#include "cliporg/resample.hpp"
#include "cliporg/wav.hpp"

namespace cliporg {

void PipelineConfig::validate() const {
    if (analysis_rate <= 0) throw RangeError("config: analysis_rate must be positive");
    if (stft.window_size < 2 || (stft.window_size & (stft.window_size - 1)) != 0)
        throw RangeError("config: window_size must be a power of two >= 2");
    if (stft.hop_size < 1 || stft.hop_size > stft.window_size)
        throw RangeError("config: hop_size must be in (0, window_size]");
    if (stft.window_size / 2 + 1 > 512)
        throw RangeError("config: window_size produces more than 512 bins; "
                         "the landmark hash packs bins into 9 bits");
    if (peaks.neighborhood_frames < 1 || peaks.neighborhood_bins < 1)
        throw RangeError("config: peak neighborhood extents must be >= 1");
    if (peaks.max_per_frame < 1) throw RangeError("config: max_per_frame must be >= 1");
    if (pairing.fan_out < 1) throw RangeError("config: fan_out must be >= 1");
    if (pairing.dt_max < 1 || pairing.dt_max > 63)
        throw RangeError("config: dt_max must be in [1, 63] (6-bit hash field)");
    if (pairing.df_max < 0 || pairing.df_max > 31)
        throw RangeError("config: df_max must be in [0, 31] (6-bit shifted hash field)");
    if (filter.t_l < 1) throw RangeError("config: t_l must be >= 1");
    if (filter.t_d >= 0) throw RangeError("config: t_d must be negative");
}

FingerprintParams PipelineConfig::fingerprint_params() const {
    return {analysis_rate, stft, peaks, pairing};
}

IngestStats ingest_directory(const std::filesystem::path& dir, const PipelineConfig& config,
                             MatchDb& db, std::ostream& log) {
    config.validate();
    if (!std::filesystem::is_directory(dir))
        throw InputError("ingest: '" + dir.string() + "' is not a directory");

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".wav")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    IngestStats stats;
    stats.files_seen = files.size();
    if (files.empty()) {
        log << "warning: no .wav files in " << dir.string() << "\n";
        return stats;
    }

    const FingerprintParams params = config.fingerprint_params();
    std::vector<std::optional<Fingerprint>> slots(files.size());
    std::vector<std::string> errors(files.size());

    parallel_for(files.size(), config.jobs, [&](std::size_t i) {
        try {
            const AudioClip clip = canonicalise(load_wav(files[i]), config.analysis_rate);
            slots[i] = fingerprint_clip(clip, files[i].stem().string(), params);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!slots[i]) {
            log << "warning: skipping " << files[i].string() << ": " << errors[i] << "\n";
            ++stats.failed;
            continue;
        }
        stats.total_landmarks += slots[i]->total_landmarks();
        db.insert(std::move(*slots[i]));
        ++stats.ingested;
    }
    return stats;
}

OrganiseResult organise(const MatchDb& db, const PipelineConfig& config,
                        const OrganiseOptions& options) {
    config.validate();
    if ((options.injections.sample_level > 0 || options.injections.landmark_level > 0) &&
        !options.manifest)
        throw InputError("organise: false-positive injection needs a ground-truth manifest");

    OrganiseResult result;

    // all-pairs matching, parallel over queries, merged in insertion order
    result.raw_lists.resize(db.size());
    parallel_for(db.size(), config.jobs, [&](std::size_t i) {
        result.raw_lists[i] = db.query(db.fingerprint(i), config.filter.t_l);
    });

    if (options.manifest) result.updated_manifest = options.manifest;
    if (options.injections.sample_level > 0 || options.injections.landmark_level > 0) {
        result.injections = inject_false_positives(
            result.raw_lists, *result.updated_manifest, db, options.injections,
            config.filter.t_l, config.filter.t_d, options.inject_seed);
    }

    result.filtered =
        filter_all(result.raw_lists, db, config.filter, options.filtering_enabled);
    result.graph = build_graph(result.filtered, db, config.stft, config.analysis_rate);
    result.clusters = connected_components(result.graph);

    result.positions.reserve(result.clusters.clusters.size());
    result.rankings.reserve(result.clusters.clusters.size());
    for (const auto& cluster : result.clusters.clusters) {
        result.positions.push_back(
            propagate_offsets(result.graph, cluster, &result.graph.warnings));
        result.rankings.push_back(rank_cluster(result.graph, cluster));
    }

    if (result.updated_manifest) {
        for (auto& cluster_scores : result.rankings)
            for (QualityScore& s : cluster_scores)
                if (const ClipTruth* t = result.updated_manifest->find_clip(s.sample_id))
                    s.is_reference = t->is_reference;
    }
    return result;
}

void write_organise_reports(const OrganiseResult& result, const PipelineConfig& config,
                            bool filtering_enabled, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_clusters_json(out_dir / "clusters.json", result.graph, result.clusters,
                        result.positions);
    write_rankings_json(out_dir / "rankings.json", result.rankings);
    write_rankings_csv(out_dir / "rankings.csv", result.rankings);
    write_graph_csv(out_dir / "graph.csv", result.graph);
    write_filter_decisions_json(out_dir / "filter_decisions.json", result.filtered,
                                config.filter, filtering_enabled,
                                config.frame_duration_s());
    if (result.updated_manifest) result.updated_manifest->save(out_dir / "manifest.json");
}

}  // namespace cliporg
