#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cliporg/audio_clip.hpp"
#include "cliporg/match_db.hpp"

namespace cliporg {

/// Parameters of the synthetic concert corpus. Each song gets one clean
/// full-length reference take plus several cropped, gain-scaled, noisy user
/// takes; every user crop contains a common window of min_overlap_s seconds,
/// so any two clips of a song overlap by at least that much.
struct CorpusSpec {
    std::uint64_t seed = 42;
    int n_songs = 10;
    double song_duration_s = 240.0;
    int clips_per_song_min = 5;   // including the reference take
    int clips_per_song_max = 9;
    double crop_length_min_s = 45.0;
    double crop_length_max_s = 90.0;
    double snr_min_db = 5.0;
    double snr_max_db = 25.0;
    double reference_snr_db = 60.0;  // effectively clean
    double gain_min = 0.7;
    double gain_max = 1.0;
    double min_overlap_s = 10.0;
    int sample_rate = 11025;

    // Crop starts snap to this many samples (the analysis hop), keeping all
    // clip frame grids phase-aligned. Sub-hop capture skew belongs to the
    // clock-drift family of artifacts this corpus does not model.
    int crop_align_samples = 256;

    void validate() const;  // throws RangeError on nonsense ranges
};

struct ClipTruth {
    std::string clip_id;
    std::string song_id;
    double crop_start_s = 0.0;
    double crop_length_s = 0.0;
    double snr_db = 0.0;
    double gain = 1.0;
    bool is_reference = false;
};

enum class FpKind { sample_level, landmark_level };

const char* to_string(FpKind kind);

/// A false-positive group planted into a raw matching list, recorded so the
/// evaluator can check the filter removed it.
struct InjectedFp {
    std::string query_id;
    std::string phantom_candidate_id;
    FpKind kind = FpKind::sample_level;
    std::int64_t offset_frames = 0;
    int l = 0;
};

struct GroundTruthManifest {
    std::uint64_t seed = 0;
    int sample_rate = 11025;
    int n_songs = 0;
    double song_duration_s = 0.0;
    double min_overlap_s = 0.0;
    std::vector<ClipTruth> clips;
    std::vector<InjectedFp> injected;

    const ClipTruth* find_clip(const std::string& clip_id) const;
    std::string to_json() const;
    static GroundTruthManifest from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static GroundTruthManifest load(const std::filesystem::path& path);
};

/// Deterministic pseudo-musical signal: a seeded random walk over a
/// pentatonic pitch set (per-seed root), each note a sum of four decaying
/// harmonics, plus low-level broadband texture.
AudioClip generate_song(std::uint64_t seed, double duration_s, int sample_rate);

/// Crops [crop_start_s, crop_start_s + crop_length_s), scales by gain, adds
/// seeded white noise at the requested SNR (measured against the scaled
/// crop's RMS), and clamps to [-1, 1]. Throws RangeError when the window
/// falls outside the song.
AudioClip derive_clip(const AudioClip& song, double crop_start_s, double crop_length_s,
                      double snr_db, double gain, std::uint64_t noise_seed);

/// Writes <clip_id>.wav files (16-bit PCM) plus manifest.json into out_dir
/// and returns the manifest. Byte-identical output for identical specs.
GroundTruthManifest generate_corpus(const CorpusSpec& spec,
                                    const std::filesystem::path& out_dir);

struct InjectionCounts {
    int sample_level = 0;
    int landmark_level = 0;
};

struct InjectionOutcome {
    int sample_level_injected = 0;
    int landmark_level_injected = 0;
    int skipped = 0;
};

/// Plants false positives into raw matching lists, honouring the observed
/// regime: phantom groups get fewer matching landmarks than any true match
/// (sample level: p at least 0.05 below the list's minimum true p;
/// landmark level: a duplicate offset with strictly smaller l). Placements
/// whose p gap clears the slope threshold t_d are preferred. Injections
/// that cannot honour the p gap are skipped and counted. All injections are
/// appended to the manifest.
InjectionOutcome inject_false_positives(std::vector<RawMatchingList>& raw_lists,
                                        GroundTruthManifest& manifest,
                                        const MatchDb& db, const InjectionCounts& counts,
                                        int t_l, double t_d, std::uint64_t seed);

}  // namespace cliporg
