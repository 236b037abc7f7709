#include "cliporg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "cliporg/errors.hpp"
#include "cliporg/filtering.hpp"
#include "cliporg/rng.hpp"
#include "cliporg/wav.hpp"

namespace cliporg {

void CorpusSpec::validate() const {
    if (n_songs < 1 || n_songs > 99) throw RangeError("corpus: n_songs must be in [1, 99]");
    if (song_duration_s < 30.0) throw RangeError("corpus: song duration must be >= 30 s");
    if (clips_per_song_min < 2 || clips_per_song_min > clips_per_song_max)
        throw RangeError("corpus: clips_per_song range must be non-empty and >= 2");
    if (clips_per_song_max > 99) throw RangeError("corpus: clips_per_song_max must be <= 99");
    if (crop_length_min_s <= 0 || crop_length_min_s > crop_length_max_s)
        throw RangeError("corpus: crop length range must be non-empty and positive");
    if (crop_length_max_s > song_duration_s)
        throw RangeError("corpus: crop length must not exceed the song duration");
    if (min_overlap_s <= 0 || min_overlap_s > crop_length_min_s)
        throw RangeError("corpus: min_overlap_s must be in (0, crop_length_min_s]");
    if (snr_min_db > snr_max_db) throw RangeError("corpus: SNR range must be non-empty");
    if (gain_min <= 0 || gain_min > gain_max)
        throw RangeError("corpus: gain range must be non-empty and positive");
    if (sample_rate <= 0) throw RangeError("corpus: sample rate must be positive");
    if (crop_align_samples < 1)
        throw RangeError("corpus: crop_align_samples must be >= 1");
}

const char* to_string(FpKind kind) {
    return kind == FpKind::sample_level ? "sample_level" : "landmark_level";
}

namespace {

FpKind fp_kind_from_string(const std::string& s) {
    if (s == "sample_level") return FpKind::sample_level;
    if (s == "landmark_level") return FpKind::landmark_level;
    throw DecodeError("manifest: unknown false-positive kind '" + s + "'");
}

constexpr int kManifestSchemaVersion = 1;

}  // namespace

const ClipTruth* GroundTruthManifest::find_clip(const std::string& clip_id) const {
    for (const ClipTruth& c : clips)
        if (c.clip_id == clip_id) return &c;
    return nullptr;
}

std::string GroundTruthManifest::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kManifestSchemaVersion;
    j["seed"] = seed;
    j["sample_rate"] = sample_rate;
    j["n_songs"] = n_songs;
    j["song_duration_s"] = song_duration_s;
    j["min_overlap_s"] = min_overlap_s;
    auto& clip_arr = j["clips"] = nlohmann::json::array();
    for (const ClipTruth& c : clips) {
        clip_arr.push_back({{"clip_id", c.clip_id},
                            {"song_id", c.song_id},
                            {"crop_start_s", c.crop_start_s},
                            {"crop_length_s", c.crop_length_s},
                            {"snr_db", c.snr_db},
                            {"gain", c.gain},
                            {"is_reference", c.is_reference}});
    }
    auto& fp_arr = j["injected_false_positives"] = nlohmann::json::array();
    for (const InjectedFp& f : injected) {
        fp_arr.push_back({{"query_id", f.query_id},
                          {"phantom_candidate_id", f.phantom_candidate_id},
                          {"kind", to_string(f.kind)},
                          {"offset_frames", f.offset_frames},
                          {"l", f.l}});
    }
    return j.dump(2);
}

GroundTruthManifest GroundTruthManifest::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("manifest: not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != kManifestSchemaVersion)
            throw DecodeError("manifest: unsupported schema version");
        GroundTruthManifest m;
        m.seed = j.at("seed").get<std::uint64_t>();
        m.sample_rate = j.at("sample_rate").get<int>();
        m.n_songs = j.at("n_songs").get<int>();
        m.song_duration_s = j.at("song_duration_s").get<double>();
        m.min_overlap_s = j.at("min_overlap_s").get<double>();
        for (const auto& c : j.at("clips")) {
            ClipTruth t;
            t.clip_id = c.at("clip_id").get<std::string>();
            t.song_id = c.at("song_id").get<std::string>();
            t.crop_start_s = c.at("crop_start_s").get<double>();
            t.crop_length_s = c.at("crop_length_s").get<double>();
            t.snr_db = c.at("snr_db").get<double>();
            t.gain = c.at("gain").get<double>();
            t.is_reference = c.at("is_reference").get<bool>();
            m.clips.push_back(std::move(t));
        }
        for (const auto& f : j.at("injected_false_positives")) {
            InjectedFp fp;
            fp.query_id = f.at("query_id").get<std::string>();
            fp.phantom_candidate_id = f.at("phantom_candidate_id").get<std::string>();
            fp.kind = fp_kind_from_string(f.at("kind").get<std::string>());
            fp.offset_frames = f.at("offset_frames").get<std::int64_t>();
            fp.l = f.at("l").get<int>();
            m.injected.push_back(std::move(fp));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("manifest: missing or mistyped field: ") + e.what());
    }
}

void GroundTruthManifest::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << to_json() << '\n';
}

GroundTruthManifest GroundTruthManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

AudioClip generate_song(std::uint64_t seed, double duration_s, int sample_rate) {
    if (duration_s < 30.0) throw RangeError("generate_song: duration must be >= 30 s");
    if (sample_rate <= 0) throw RangeError("generate_song: sample rate must be positive");

    Rng rng(seed);
    const auto total = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    std::vector<double> buf(total, 0.0);

    // Distinct songs must not share landmarks, so each song gets its own
    // pitch material: a random root, a random five-degree scale, and a
    // per-note detune. Pitches sit high enough that a semitone spans more
    // than one STFT bin at the analysis rate.
    const double root_hz = 392.0 * std::pow(2.0, rng.uniform(0.0, 12.0) / 12.0);
    int scale[5];
    {
        int pool[12];
        for (int i = 0; i < 12; ++i) pool[i] = i;
        for (int i = 0; i < 5; ++i) {
            const int j = static_cast<int>(rng.uniform_int(i, 11));
            std::swap(pool[i], pool[j]);
            scale[i] = pool[i];
        }
        std::sort(scale, scale + 5);
    }
    constexpr int kDegrees = 15;  // the scale spanned over three octaves
    constexpr int kHarmonics = 4;
    const double nyquist_guard = 0.45 * sample_rate;

    int walk = static_cast<int>(rng.uniform_int(0, kDegrees - 1));
    double cursor_s = 0.0;
    while (cursor_s < duration_s) {
        // never repeat the previous slot; reflect at the range ends
        const int magnitude = static_cast<int>(rng.uniform_int(1, 3));
        const int step = rng.uniform_int(0, 1) ? magnitude : -magnitude;
        walk += step;
        if (walk < 0) walk = -walk;
        if (walk >= kDegrees) walk = 2 * (kDegrees - 1) - walk;
        const double semitones = scale[walk % 5] + 12.0 * (walk / 5) +
                                 rng.uniform(-0.5, 0.5);
        const double note_hz = root_hz * std::pow(2.0, semitones / 12.0);
        const double note_len_s = rng.uniform(0.15, 0.45);
        const double amp = rng.uniform(0.25, 0.5);

        // Inharmonic, per-note timbre: overtones are individually detuned
        // and only sometimes present. Two notes that happen to rhyme at the
        // fundamental then disagree at the overtones, so a chance rhyme
        // between songs yields far fewer than t_l matching landmarks.
        double freq[kHarmonics];
        double weight[kHarmonics];
        double phase[kHarmonics];
        for (int h = 0; h < kHarmonics; ++h) {
            const double detune = h == 0 ? 0.0 : rng.uniform(-0.6, 0.6);
            freq[h] = note_hz * (h + 1) * std::pow(2.0, detune / 12.0);
            const bool present = h == 0 || rng.uniform(0.0, 1.0) < 0.6;
            weight[h] = present ? std::pow(0.5, h) * rng.uniform(0.6, 1.2) : 0.0;
            phase[h] = rng.uniform(0.0, 2.0 * std::numbers::pi);
            if (freq[h] >= nyquist_guard) weight[h] = 0.0;
        }

        // Let the decay tail ring into the next note.
        const auto start = static_cast<std::size_t>(std::llround(cursor_s * sample_rate));
        const auto stop = std::min(
            total, start + static_cast<std::size_t>(std::llround(1.5 * note_len_s * sample_rate)));
        for (std::size_t i = start; i < stop; ++i) {
            const double t = static_cast<double>(i - start) / sample_rate;
            const double env = amp * std::exp(-3.0 * t / note_len_s);
            double v = 0.0;
            for (int h = 0; h < kHarmonics; ++h) {
                if (weight[h] == 0.0) continue;
                v += weight[h] * std::sin(2.0 * std::numbers::pi * freq[h] * t + phase[h]);
            }
            buf[i] += env * v;
        }
        cursor_s += note_len_s * rng.uniform(1.0, 1.35);
    }

    // Broadband texture well below the tonal content.
    for (double& s : buf) s += rng.uniform(-0.003, 0.003);

    double peak = 0.0;
    for (const double s : buf) peak = std::max(peak, std::abs(s));
    const double norm = peak > 0.0 ? 0.6 / peak : 1.0;

    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.channels = 1;
    clip.samples.resize(total);
    for (std::size_t i = 0; i < total; ++i)
        clip.samples[i] = static_cast<float>(buf[i] * norm);
    return clip;
}

AudioClip derive_clip(const AudioClip& song, double crop_start_s, double crop_length_s,
                      double snr_db, double gain, std::uint64_t noise_seed) {
    if (song.channels != 1) throw RangeError("derive_clip: song must be mono");
    if (!std::isfinite(snr_db)) throw RangeError("derive_clip: snr_db must be finite");
    const auto start = std::llround(crop_start_s * song.sample_rate);
    const auto count = std::llround(crop_length_s * song.sample_rate);
    if (start < 0 || count < 1 ||
        static_cast<std::size_t>(start + count) > song.frames())
        throw RangeError("derive_clip: crop window outside the song");

    std::vector<double> buf(static_cast<std::size_t>(count));
    double energy = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        buf[i] = static_cast<double>(song.samples[static_cast<std::size_t>(start) + i]) * gain;
        energy += buf[i] * buf[i];
    }
    const double signal_rms = std::sqrt(energy / static_cast<double>(buf.size()));
    const double target_noise_rms = signal_rms / std::pow(10.0, snr_db / 20.0);

    if (target_noise_rms > 0.0) {
        Rng rng(noise_seed);
        std::vector<double> noise(buf.size());
        double noise_energy = 0.0;
        for (double& n : noise) {
            n = rng.uniform(-1.0, 1.0);
            noise_energy += n * n;
        }
        const double noise_rms = std::sqrt(noise_energy / static_cast<double>(noise.size()));
        if (noise_rms > 0.0) {
            const double scale = target_noise_rms / noise_rms;
            for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += noise[i] * scale;
        }
    }

    AudioClip clip;
    clip.sample_rate = song.sample_rate;
    clip.channels = 1;
    clip.samples.resize(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        clip.samples[i] = static_cast<float>(std::clamp(buf[i], -1.0, 1.0));
    return clip;
}

namespace {

std::string two_digits(int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

}  // namespace

GroundTruthManifest generate_corpus(const CorpusSpec& spec,
                                    const std::filesystem::path& out_dir) {
    spec.validate();
    std::filesystem::create_directories(out_dir);

    GroundTruthManifest manifest;
    manifest.seed = spec.seed;
    manifest.sample_rate = spec.sample_rate;
    manifest.n_songs = spec.n_songs;
    manifest.song_duration_s = spec.song_duration_s;
    manifest.min_overlap_s = spec.min_overlap_s;

    Rng rng(spec.seed);
    for (int s = 0; s < spec.n_songs; ++s) {
        const std::string song_id = "s" + two_digits(s + 1);
        const AudioClip song = generate_song(Rng::mix(spec.seed, 0x534f4e47u + s),
                                             spec.song_duration_s, spec.sample_rate);
        const int clip_count =
            static_cast<int>(rng.uniform_int(spec.clips_per_song_min, spec.clips_per_song_max));
        // Every user crop contains this window, so all pairs overlap. Kept
        // away from the song edges when possible: a window at the edge
        // clamps every crop against it and piles them on top of each other.
        double lo = std::max(0.0, spec.crop_length_max_s - spec.min_overlap_s);
        double hi = std::min(spec.song_duration_s - spec.min_overlap_s,
                             spec.song_duration_s - spec.crop_length_max_s);
        if (lo > hi) {
            lo = 0.0;
            hi = spec.song_duration_s - spec.min_overlap_s;
        }
        const double common_start = rng.uniform(lo, hi);

        for (int u = 0; u < clip_count; ++u) {
            ClipTruth truth;
            truth.song_id = song_id;
            if (u == 0) {
                truth.clip_id = song_id + "_ref";
                truth.crop_start_s = 0.0;
                truth.crop_length_s = spec.song_duration_s;
                truth.snr_db = spec.reference_snr_db;
                truth.gain = 1.0;
                truth.is_reference = true;
            } else {
                truth.clip_id = song_id + "_u" + two_digits(u);
                truth.crop_length_s = rng.uniform(spec.crop_length_min_s, spec.crop_length_max_s);
                const double start_lo =
                    std::max(0.0, common_start + spec.min_overlap_s - truth.crop_length_s);
                const double start_hi =
                    std::min(common_start, spec.song_duration_s - truth.crop_length_s);
                const double align_s =
                    static_cast<double>(spec.crop_align_samples) / spec.sample_rate;
                const auto k_lo = static_cast<std::int64_t>(std::ceil(start_lo / align_s));
                const auto k_hi = static_cast<std::int64_t>(std::floor(start_hi / align_s));
                truth.crop_start_s = k_lo <= k_hi
                                         ? static_cast<double>(rng.uniform_int(k_lo, k_hi)) * align_s
                                         : rng.uniform(start_lo, start_hi);
                truth.snr_db = rng.uniform(spec.snr_min_db, spec.snr_max_db);
                truth.gain = rng.uniform(spec.gain_min, spec.gain_max);
                truth.is_reference = false;
            }
            const std::uint64_t noise_seed =
                Rng::mix(spec.seed, 0x4e4f4953u + static_cast<std::uint64_t>(s) * 100 + u);
            const AudioClip clip =
                derive_clip(song, truth.crop_start_s, truth.crop_length_s, truth.snr_db,
                            truth.gain, noise_seed);
            save_wav_pcm16(out_dir / (truth.clip_id + ".wav"), clip);
            manifest.clips.push_back(std::move(truth));
        }
    }

    manifest.save(out_dir / "manifest.json");
    return manifest;
}

namespace {

struct ListView {
    std::size_t query_index;
    double min_true_p;  // over deduped non-injected candidates
};

}  // namespace

InjectionOutcome inject_false_positives(std::vector<RawMatchingList>& raw_lists,
                                        GroundTruthManifest& manifest, const MatchDb& db,
                                        const InjectionCounts& counts, int t_l, double t_d,
                                        std::uint64_t seed) {
    if (t_l < 1) throw RangeError("inject: t_l must be >= 1");
    InjectionOutcome outcome;
    Rng rng(Rng::mix(seed, 0x464a50u));

    auto song_of = [&](const std::string& clip_id) -> std::string {
        const ClipTruth* t = manifest.find_clip(clip_id);
        if (!t) throw InputError("inject: clip '" + clip_id + "' missing from manifest");
        return t->song_id;
    };

    // (query_id, candidate_id, offset) triples that are injections, so later
    // passes treat them as phantom rather than true evidence.
    std::set<std::tuple<std::string, std::string, std::int64_t>> injected_groups;
    auto is_injected = [&](const std::string& q, const OffsetGroup& g) {
        return injected_groups.count({q, g.candidate_id, g.offset_frames}) > 0;
    };

    auto resort = [](RawMatchingList& list) {
        std::sort(list.groups.begin(), list.groups.end(),
                  [](const OffsetGroup& a, const OffsetGroup& b) {
                      if (a.l != b.l) return a.l > b.l;
                      if (a.candidate_index != b.candidate_index)
                          return a.candidate_index < b.candidate_index;
                      return a.offset_frames < b.offset_frames;
                  });
    };

    auto min_true_p = [&](const RawMatchingList& raw) {
        const MatchingList deduped = dedupe_offsets(raw, db);
        double min_p = std::numeric_limits<double>::infinity();
        for (const MatchCandidate& c : deduped.candidates) {
            if (injected_groups.count({raw.query_id, c.candidate_id, c.offset_frames}))
                continue;
            min_p = std::min(min_p, c.p);
        }
        return min_p;
    };

    // Whether the default filter would actually cut the phantom: the slope
    // rule never tests the edge leaving the above-average prefix, so a
    // phantom whose presence drags the mean under every true candidate
    // survives. Simulating the filtered list settles it exactly.
    auto filter_removes = [&](const RawMatchingList& raw, const OffsetGroup& phantom) {
        RawMatchingList probe = raw;
        probe.groups.push_back(phantom);
        FilterParams params;
        params.t_l = t_l;
        params.t_d = t_d;
        const MatchingList filtered = filter_matches(dedupe_offsets(probe, db), params);
        for (const MatchCandidate& c : filtered.candidates)
            if (c.candidate_index == phantom.candidate_index &&
                c.offset_frames == phantom.offset_frames)
                return false;
        return true;
    };

    std::set<std::string> used_songs;  // spreads sample-level bridges over songs
    std::set<std::pair<std::string, std::string>> used_pairs;

    for (int k = 0; k < counts.sample_level; ++k) {
        const int l = static_cast<int>(rng.uniform_int(t_l, t_l + 3));
        const std::int64_t offset = rng.uniform_int(-200, 200);

        struct Choice {
            std::size_t list_index;
            std::size_t phantom_index;
            bool removable;
            bool fresh_songs;
            double gap;
        };
        std::optional<Choice> best;
        for (std::size_t li = 0; li < raw_lists.size(); ++li) {
            const RawMatchingList& raw = raw_lists[li];
            if (raw.groups.empty()) continue;
            const double min_p = min_true_p(raw);
            if (!std::isfinite(min_p)) continue;
            const std::string query_song = song_of(raw.query_id);

            std::set<std::size_t> present;
            for (const OffsetGroup& g : raw.groups) present.insert(g.candidate_index);

            for (std::size_t xi = 0; xi < db.size(); ++xi) {
                const Fingerprint& phantom = db.fingerprint(xi);
                if (phantom.sample_id == raw.query_id || present.count(xi)) continue;
                const std::string phantom_song = song_of(phantom.sample_id);
                if (phantom_song == query_song) continue;
                if (used_pairs.count({raw.query_id, phantom.sample_id})) continue;
                if (phantom.total_landmarks() == 0) continue;
                const double p =
                    static_cast<double>(l) / static_cast<double>(phantom.total_landmarks());
                const double gap = min_p - p;
                if (gap < 0.05) continue;
                const bool fresh =
                    !used_songs.count(query_song) && !used_songs.count(phantom_song);
                const bool removable =
                    filter_removes(raw, {phantom.sample_id, xi, offset, l});
                Choice choice{li, xi, removable, fresh, gap};
                if (!best || std::tie(choice.removable, choice.fresh_songs, choice.gap) >
                                 std::tie(best->removable, best->fresh_songs, best->gap))
                    best = choice;
            }
        }

        if (!best) {
            ++outcome.skipped;
            continue;
        }
        RawMatchingList& raw = raw_lists[best->list_index];
        const Fingerprint& phantom = db.fingerprint(best->phantom_index);
        raw.groups.push_back({phantom.sample_id, best->phantom_index, offset, l});
        resort(raw);
        injected_groups.insert({raw.query_id, phantom.sample_id, offset});
        used_pairs.insert({raw.query_id, phantom.sample_id});
        used_songs.insert(song_of(raw.query_id));
        used_songs.insert(song_of(phantom.sample_id));
        manifest.injected.push_back(
            {raw.query_id, phantom.sample_id, FpKind::sample_level, offset, l});
        ++outcome.sample_level_injected;
    }

    std::set<std::pair<std::string, std::string>> duplicated;
    for (int k = 0; k < counts.landmark_level; ++k) {
        struct Choice {
            std::size_t list_index;
            std::size_t group_index;
            bool fresh_query;
            int l;
        };
        std::optional<Choice> best;
        std::set<std::string> queries_used;
        for (const auto& fp : manifest.injected)
            if (fp.kind == FpKind::landmark_level) queries_used.insert(fp.query_id);

        for (std::size_t li = 0; li < raw_lists.size(); ++li) {
            const RawMatchingList& raw = raw_lists[li];
            for (std::size_t gi = 0; gi < raw.groups.size(); ++gi) {
                const OffsetGroup& g = raw.groups[gi];
                if (g.l < t_l + 1) continue;
                if (is_injected(raw.query_id, g)) continue;
                if (duplicated.count({raw.query_id, g.candidate_id})) continue;
                Choice choice{li, gi, queries_used.count(raw.query_id) == 0, g.l};
                if (!best || std::tie(choice.fresh_query, choice.l) >
                                 std::tie(best->fresh_query, best->l))
                    best = choice;
            }
        }

        if (!best) {
            ++outcome.skipped;
            continue;
        }
        RawMatchingList& raw = raw_lists[best->list_index];
        const OffsetGroup original = raw.groups[best->group_index];
        const int dup_l = static_cast<int>(rng.uniform_int(t_l, original.l - 1));
        std::int64_t dup_offset = original.offset_frames;
        for (int attempt = 0; attempt < 64; ++attempt) {
            const std::int64_t shift = rng.uniform_int(10, 60 + attempt);
            const std::int64_t candidate_offset =
                original.offset_frames + (rng.uniform_int(0, 1) ? shift : -shift);
            const bool clashes = std::any_of(
                raw.groups.begin(), raw.groups.end(), [&](const OffsetGroup& g) {
                    return g.candidate_index == original.candidate_index &&
                           g.offset_frames == candidate_offset;
                });
            if (!clashes) {
                dup_offset = candidate_offset;
                break;
            }
        }
        raw.groups.push_back(
            {original.candidate_id, original.candidate_index, dup_offset, dup_l});
        resort(raw);
        injected_groups.insert({raw.query_id, original.candidate_id, dup_offset});
        duplicated.insert({raw.query_id, original.candidate_id});
        manifest.injected.push_back({raw.query_id, original.candidate_id,
                                     FpKind::landmark_level, dup_offset, dup_l});
        ++outcome.landmark_level_injected;
    }

    return outcome;
}

}  // namespace cliporg
