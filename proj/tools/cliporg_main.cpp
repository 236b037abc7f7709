// cliporg: organises collections of overlapping concert recordings by audio
// fingerprint. Subcommands cover the whole pipeline: generate a synthetic
// test corpus, ingest WAV files into a fingerprint database, organise the
// database into clusters and quality rankings, evaluate the reports against
// a ground-truth manifest, and dump single fingerprints for debugging.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cliporg/errors.hpp"
#include "cliporg/pipeline.hpp"
#include "cliporg/resample.hpp"
#include "cliporg/wav.hpp"

namespace fs = std::filesystem;
using namespace cliporg;

namespace {

std::pair<double, double> parse_range(const std::string& text, const char* flag) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            const double v = std::stod(text);
            return {v, v};
        }
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw InputError(std::string(flag) + ": expected LO:HI, got '" + text + "'");
    }
}

void add_pipeline_flags(CLI::App* cmd, PipelineConfig& config) {
    cmd->add_option("--rate", config.analysis_rate, "Analysis sample rate (Hz)")
        ->capture_default_str();
    cmd->add_option("--window", config.stft.window_size, "STFT window size (samples)")
        ->capture_default_str();
    cmd->add_option("--hop", config.stft.hop_size, "STFT hop size (samples)")
        ->capture_default_str();
    cmd->add_option("--peak-frames", config.peaks.neighborhood_frames,
                    "Peak neighborhood half-extent in frames")
        ->capture_default_str();
    cmd->add_option("--peak-bins", config.peaks.neighborhood_bins,
                    "Peak neighborhood half-extent in bins")
        ->capture_default_str();
    cmd->add_option("--peaks-per-frame", config.peaks.max_per_frame,
                    "Strongest peaks kept per frame")
        ->capture_default_str();
    cmd->add_option("--peak-floor", config.peaks.min_magnitude,
                    "Minimum log-magnitude for a peak")
        ->capture_default_str();
    cmd->add_option("--fan-out", config.pairing.fan_out, "Landmarks per anchor peak")
        ->capture_default_str();
    cmd->add_option("--dt-max", config.pairing.dt_max,
                    "Maximum frame offset between paired peaks")
        ->capture_default_str();
    cmd->add_option("--df-max", config.pairing.df_max,
                    "Maximum bin distance between paired peaks")
        ->capture_default_str();
    cmd->add_option("--t-l", config.filter.t_l,
                    "Minimum matching landmarks for a match")
        ->capture_default_str();
    cmd->add_option("--t-d", config.filter.t_d,
                    "Slope threshold marking the false-positive boundary")
        ->capture_default_str();
    cmd->add_flag("--strict-drop-edge", config.filter.strict_drop_edge,
                  "Reject the sample the steep drop lands on");
    cmd->add_option("--jobs", config.jobs, "Worker threads (0 = all cores)")
        ->capture_default_str();
}

int run_gen_corpus(const CorpusSpec& spec, const fs::path& out) {
    const GroundTruthManifest manifest = generate_corpus(spec, out);
    std::printf("wrote %zu clips for %d songs to %s (manifest.json included)\n",
                manifest.clips.size(), spec.n_songs, out.string().c_str());
    return 0;
}

int run_ingest(const fs::path& dir, const fs::path& out, const PipelineConfig& config) {
    MatchDb db;
    const IngestStats stats = ingest_directory(dir, config, db, std::cerr);
    db.save_file(out);
    std::printf("ingested %zu of %zu clips (%zu landmarks) into %s\n", stats.ingested,
                stats.files_seen, stats.total_landmarks, out.string().c_str());
    if (stats.failed > 0)
        std::fprintf(stderr, "warning: %zu file(s) skipped\n", stats.failed);
    return stats.files_seen > 0 && stats.ingested == 0 ? 1 : 0;
}

int run_organise(const fs::path& db_path, const fs::path& out, const PipelineConfig& config,
                 bool no_filter, const std::optional<fs::path>& manifest_path,
                 const InjectionCounts& injections, std::uint64_t inject_seed) {
    const MatchDb db = MatchDb::load_file(db_path, config.pairing.df_max);

    OrganiseOptions options;
    options.filtering_enabled = !no_filter;
    options.injections = injections;
    options.inject_seed = inject_seed;
    if (manifest_path) options.manifest = GroundTruthManifest::load(*manifest_path);

    const OrganiseResult result = organise(db, config, options);
    write_organise_reports(result, config, options.filtering_enabled, out);

    std::printf("%zu clusters, %zu unmatched samples (filtering %s)\n",
                result.clusters.clusters.size(), result.clusters.unmatched.size(),
                options.filtering_enabled ? "on" : "off");
    if (injections.sample_level > 0 || injections.landmark_level > 0)
        std::printf("injected %d sample-level and %d landmark-level false positives"
                    " (%d skipped); updated manifest written\n",
                    result.injections.sample_level_injected,
                    result.injections.landmark_level_injected, result.injections.skipped);
    for (const std::string& warning : result.graph.warnings)
        std::fprintf(stderr, "warning: %s\n", warning.c_str());
    std::printf("reports written to %s\n", out.string().c_str());
    return 0;
}

int run_eval(const fs::path& reports, const fs::path& manifest_path,
             const std::optional<fs::path>& out) {
    const GroundTruthManifest manifest = GroundTruthManifest::load(manifest_path);
    const Metrics metrics = evaluate_reports(reports, manifest);
    metrics.print(std::cout);
    const fs::path metrics_path = out ? *out : reports / "metrics.json";
    write_metrics_json(metrics_path, metrics);
    std::printf("metrics written to %s\n", metrics_path.string().c_str());
    return 0;
}

int run_dump(const fs::path& input, const std::optional<fs::path>& out,
             const PipelineConfig& config) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw InputError("cannot open " + input.string());
    char magic[4] = {};
    in.read(magic, 4);
    in.seekg(0);

    Fingerprint fp;
    if (std::string(magic, 4) == "CLFP") {
        fp = read_fingerprint(in);
    } else {
        const AudioClip clip = canonicalise(load_wav(input), config.analysis_rate);
        fp = fingerprint_clip(clip, input.stem().string(), config.fingerprint_params());
    }
    const std::string json = fingerprint_to_json(fp);
    if (out) {
        std::ofstream os(*out, std::ios::binary | std::ios::trunc);
        if (!os) throw InputError("cannot write " + out->string());
        os << json << '\n';
    } else {
        std::cout << json << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"organise overlapping concert recordings by audio fingerprint"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file (key=value; sections per subcommand)")
        ->envname("CLIPORG_CONFIG");

    // gen-corpus
    CorpusSpec spec;
    std::string clips_range = "5:9", crop_range = "45:90", snr_range = "5:25",
                gain_range = "0.7:1.0";
    fs::path corpus_out;
    auto* gen = app.add_subcommand("gen-corpus",
                                   "Generate a synthetic concert corpus with ground truth");
    gen->add_option("--out", corpus_out, "Output directory")->required();
    gen->add_option("--seed", spec.seed, "Corpus seed")->capture_default_str();
    gen->add_option("--songs", spec.n_songs, "Number of songs")->capture_default_str();
    gen->add_option("--song-duration", spec.song_duration_s, "Song length (s)")
        ->capture_default_str();
    gen->add_option("--clips-per-song", clips_range,
                    "Clips per song incl. the reference (LO:HI)")
        ->capture_default_str();
    gen->add_option("--crop-length", crop_range, "User crop length range (LO:HI s)")
        ->capture_default_str();
    gen->add_option("--snr-range", snr_range, "User clip SNR range (LO:HI dB)")
        ->capture_default_str();
    gen->add_option("--gain-range", gain_range, "User clip gain range (LO:HI)")
        ->capture_default_str();
    gen->add_option("--min-overlap", spec.min_overlap_s,
                    "Guaranteed pairwise overlap (s)")
        ->capture_default_str();

    // ingest
    PipelineConfig ingest_config;
    fs::path ingest_dir, ingest_out;
    auto* ingest = app.add_subcommand("ingest", "Fingerprint a directory of WAV files");
    ingest->add_option("--dir", ingest_dir, "Directory of .wav clips")->required();
    ingest->add_option("--out", ingest_out, "Database file to write")->required();
    add_pipeline_flags(ingest, ingest_config);

    // organise
    PipelineConfig organise_config;
    fs::path organise_db, organise_out;
    bool no_filter = false;
    InjectionCounts injections;
    std::uint64_t inject_seed = 1;
    std::string manifest_arg;
    auto* org = app.add_subcommand(
        "organise", "Match, filter, cluster and rank a fingerprint database");
    org->add_option("--db", organise_db, "Database file from ingest")->required();
    org->add_option("--out", organise_out, "Report directory")->required();
    org->add_flag("--no-filter", no_filter, "Skip false-positive filtering");
    org->add_option("--manifest", manifest_arg,
                    "Ground-truth manifest (enables reference flags and injection)");
    org->add_option("--inject-sample-fps", injections.sample_level,
                    "Sample-level false positives to inject");
    org->add_option("--inject-landmark-fps", injections.landmark_level,
                    "Landmark-level false positives to inject");
    org->add_option("--inject-seed", inject_seed, "Injection seed")->capture_default_str();
    add_pipeline_flags(org, organise_config);

    // eval
    fs::path eval_reports, eval_manifest;
    std::string eval_out;
    auto* eval = app.add_subcommand("eval", "Score organise reports against ground truth");
    eval->add_option("--reports", eval_reports, "Report directory from organise")->required();
    eval->add_option("--manifest", eval_manifest, "Ground-truth manifest")->required();
    eval->add_option("--out", eval_out, "Metrics file (default: <reports>/metrics.json)");

    // dump-fingerprint
    PipelineConfig dump_config;
    fs::path dump_input;
    std::string dump_out;
    auto* dump = app.add_subcommand("dump-fingerprint",
                                    "Print a clip's fingerprint as JSON");
    dump->add_option("--input", dump_input, "A .wav clip or a CLFP fingerprint file")
        ->required();
    dump->add_option("--out", dump_out, "Write JSON here instead of stdout");
    add_pipeline_flags(dump, dump_config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            std::tie(spec.crop_length_min_s, spec.crop_length_max_s) =
                parse_range(crop_range, "--crop-length");
            std::tie(spec.snr_min_db, spec.snr_max_db) = parse_range(snr_range, "--snr-range");
            std::tie(spec.gain_min, spec.gain_max) = parse_range(gain_range, "--gain-range");
            const auto clips = parse_range(clips_range, "--clips-per-song");
            spec.clips_per_song_min = static_cast<int>(clips.first);
            spec.clips_per_song_max = static_cast<int>(clips.second);
            return run_gen_corpus(spec, corpus_out);
        }
        if (ingest->parsed()) {
            ingest_config.validate();
            return run_ingest(ingest_dir, ingest_out, ingest_config);
        }
        if (org->parsed()) {
            organise_config.validate();
            std::optional<fs::path> manifest;
            if (!manifest_arg.empty()) manifest = fs::path(manifest_arg);
            return run_organise(organise_db, organise_out, organise_config, no_filter,
                                manifest, injections, inject_seed);
        }
        if (eval->parsed()) {
            std::optional<fs::path> out;
            if (!eval_out.empty()) out = fs::path(eval_out);
            return run_eval(eval_reports, eval_manifest, out);
        }
        if (dump->parsed()) {
            dump_config.validate();
            std::optional<fs::path> out;
            if (!dump_out.empty()) out = fs::path(dump_out);
            return run_dump(dump_input, out, dump_config);
        }
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DecodeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const UnsupportedFormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const RangeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
    return 0;
}
