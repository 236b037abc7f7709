// Acceptance suite: end-to-end checks on the seeded default corpus plus the
// oracle-equivalence and filter-rule suites. Prints one PASS/FAIL line per
// criterion and exits with the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cliporg/errors.hpp"
#include "cliporg/pipeline.hpp"
#include "cliporg/rng.hpp"

#include "test_support.hpp"

using namespace cliporg;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::vector<char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("acceptance: cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool same_bytes(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// criterion 7: oracle equivalence suites

int oracle_peaks_mismatches(int cases) {
    Rng rng(0xACC1);
    int mismatches = 0;
    for (int round = 0; round < cases; ++round) {
        const auto frames = static_cast<std::size_t>(rng.uniform_int(1, 50));
        const auto bins = static_cast<std::size_t>(rng.uniform_int(1, 50));
        std::vector<std::vector<float>> grid(frames, std::vector<float>(bins));
        for (auto& row : grid)
            for (auto& v : row) {
                v = static_cast<float>(rng.uniform(0.0, 2.0));
                if (rng.uniform_int(0, 4) == 0) v = 1.0f;
            }
        const Spectrogram spec = testsupport::make_spec(grid);
        PeakParams params;
        params.neighborhood_frames = static_cast<int>(rng.uniform_int(1, 5));
        params.neighborhood_bins = static_cast<int>(rng.uniform_int(1, 5));
        params.max_per_frame = static_cast<int>(rng.uniform_int(1, 6));
        const auto actual = extract_peaks(spec, params);
        const auto expected = testsupport::oracle_peaks(spec, params);
        if (actual.size() != expected.size()) {
            ++mismatches;
            continue;
        }
        for (std::size_t i = 0; i < actual.size(); ++i)
            if (actual[i].frame != expected[i].frame || actual[i].bin != expected[i].bin) {
                ++mismatches;
                break;
            }
    }
    return mismatches;
}

int oracle_pairing_mismatches(int cases) {
    Rng rng(0xACC2);
    int mismatches = 0;
    for (int round = 0; round < cases; ++round) {
        const int count = static_cast<int>(rng.uniform_int(0, 100));
        std::set<std::pair<int, int>> positions;
        while (static_cast<int>(positions.size()) < count)
            positions.insert({static_cast<int>(rng.uniform_int(0, 80)),
                              static_cast<int>(rng.uniform_int(0, 120))});
        std::vector<Peak> peaks;
        for (const auto& [frame, bin] : positions) peaks.push_back({frame, bin, 1.0f});
        PairingParams params;
        params.fan_out = static_cast<int>(rng.uniform_int(1, 5));
        params.dt_max = static_cast<int>(rng.uniform_int(1, 63));
        params.df_max = static_cast<int>(rng.uniform_int(0, 31));
        if (pair_landmarks(peaks, params) != testsupport::oracle_pairs(peaks, params))
            ++mismatches;
    }
    return mismatches;
}

int oracle_query_mismatches(int cases) {
    Rng rng(0xACC3);
    int mismatches = 0;
    for (int round = 0; round < cases; ++round) {
        const int n = static_cast<int>(rng.uniform_int(1, 5));
        std::vector<Fingerprint> fps;
        MatchDb db;
        for (int i = 0; i < n; ++i) {
            fps.push_back(testsupport::random_fingerprint(
                rng, "s" + std::to_string(i), static_cast<int>(rng.uniform_int(5, 60)), 40));
            db.insert(fps.back());
        }
        const int t_l = static_cast<int>(rng.uniform_int(1, 6));
        const Fingerprint query = testsupport::random_fingerprint(
            rng, "query", static_cast<int>(rng.uniform_int(5, 60)), 40);
        const RawMatchingList actual = db.query(query, t_l);
        const auto expected = testsupport::oracle_query(fps, query, t_l);
        if (actual.groups.size() != expected.size()) {
            ++mismatches;
            continue;
        }
        for (std::size_t i = 0; i < expected.size(); ++i)
            if (actual.groups[i].candidate_index != expected[i].candidate_index ||
                actual.groups[i].offset_frames != expected[i].offset ||
                actual.groups[i].l != expected[i].l) {
                ++mismatches;
                break;
            }
    }
    return mismatches;
}

int oracle_dedupe_mismatches(int cases) {
    Rng rng(0xACC4);
    std::vector<std::size_t> totals;
    for (int i = 0; i < 8; ++i)
        totals.push_back(static_cast<std::size_t>(rng.uniform_int(40, 400)));
    MatchDb db;
    for (std::size_t k = 0; k < totals.size(); ++k) {
        Fingerprint fp;
        fp.sample_id = "s" + std::to_string(k);
        for (std::size_t i = 0; i < totals[k]; ++i)
            fp.landmarks.push_back({static_cast<int>(i % 200), static_cast<int>(i % 200),
                                    static_cast<int>(i), 1});
        db.insert(std::move(fp));
    }

    int mismatches = 0;
    for (int round = 0; round < cases; ++round) {
        RawMatchingList raw;
        raw.query_id = "q";
        std::set<std::pair<std::size_t, std::int64_t>> used;
        const int n_groups = static_cast<int>(rng.uniform_int(0, 20));
        for (int g = 0; g < n_groups; ++g) {
            const auto cand = static_cast<std::size_t>(rng.uniform_int(0, 7));
            const std::int64_t offset = rng.uniform_int(-50, 50);
            if (!used.insert({cand, offset}).second) continue;
            raw.groups.push_back({db.fingerprint(cand).sample_id, cand, offset,
                                  static_cast<int>(rng.uniform_int(5, 40))});
        }
        const MatchingList actual = dedupe_offsets(raw, db);
        const auto expected = testsupport::oracle_dedupe(raw, totals);
        if (actual.n() != expected.size()) {
            ++mismatches;
            continue;
        }
        for (std::size_t i = 0; i < expected.size(); ++i)
            if (actual.candidates[i].candidate_index != expected[i].candidate_index ||
                actual.candidates[i].offset_frames != expected[i].offset_frames ||
                actual.candidates[i].l != expected[i].l) {
                ++mismatches;
                break;
            }
    }
    return mismatches;
}

int oracle_components_mismatches(int cases) {
    Rng rng(0xACC5);
    int mismatches = 0;
    for (int round = 0; round < cases; ++round) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 50));
        MatchDb db;
        for (std::size_t i = 0; i < n; ++i) {
            Fingerprint fp;
            fp.sample_id = "v" + std::to_string(i);
            db.insert(std::move(fp));
        }
        std::vector<FilterResult> lists;
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        std::set<std::pair<std::size_t, std::size_t>> seen;
        const int n_edges = static_cast<int>(rng.uniform_int(0, 60));
        for (int e = 0; e < n_edges; ++e) {
            const auto a = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
            const auto b = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
            if (a == b || !seen.insert(std::minmax(a, b)).second) continue;
            edges.emplace_back(a, b);
            FilterResult result;
            result.accepted.query_id = db.fingerprint(a).sample_id;
            MatchCandidate c;
            c.candidate_id = db.fingerprint(b).sample_id;
            c.candidate_index = b;
            c.offset_frames = 0;
            c.l = 6;
            result.accepted.candidates.push_back(c);
            lists.push_back(std::move(result));
        }
        const MatchGraph g = build_graph(lists, db, StftParams{}, 11025);
        const ClusterSet actual = connected_components(g);
        const auto expected = testsupport::oracle_components(n, edges);

        std::set<std::vector<std::size_t>> expected_clusters, actual_clusters;
        std::set<std::size_t> expected_unmatched, actual_unmatched;
        for (const auto& comp : expected) {
            if (comp.size() >= 2)
                expected_clusters.insert(comp);
            else
                expected_unmatched.insert(comp.front());
        }
        for (const auto& comp : actual.clusters) actual_clusters.insert(comp);
        actual_unmatched.insert(actual.unmatched.begin(), actual.unmatched.end());
        if (expected_clusters != actual_clusters || expected_unmatched != actual_unmatched)
            ++mismatches;
    }
    return mismatches;
}

int oracle_score_mismatches(int cases) {
    Rng rng(0xACC6);
    int mismatches = 0;
    for (int round = 0; round < cases; ++round) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(2, 15));
        MatchDb db;
        for (std::size_t i = 0; i < n; ++i) {
            Fingerprint fp;
            fp.sample_id = "v" + std::to_string(i);
            db.insert(std::move(fp));
        }
        std::vector<FilterResult> lists;
        std::vector<testsupport::AcceptedLike> flat;
        for (int e = 0; e < 25; ++e) {
            const auto a = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
            const auto b = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
            if (a == b) continue;
            const int l = static_cast<int>(rng.uniform_int(5, 60));
            FilterResult result;
            result.accepted.query_id = db.fingerprint(a).sample_id;
            MatchCandidate c;
            c.candidate_id = db.fingerprint(b).sample_id;
            c.candidate_index = b;
            c.offset_frames = 0;
            c.l = l;
            result.accepted.candidates.push_back(c);
            lists.push_back(std::move(result));
            flat.push_back({a, b, l});
        }
        const MatchGraph g = build_graph(lists, db, StftParams{}, 11025);
        for (std::size_t v = 0; v < n; ++v)
            if (score_proposed(g, v) != testsupport::oracle_proposed_score(v, flat)) {
                ++mismatches;
                break;
            }
    }
    return mismatches;
}

// ---------------------------------------------------------------------------
// criterion 8: filter rule suite

bool filter_rule_suite(std::string& detail) {
    auto list_from_l = [](const std::vector<int>& ls) {
        MatchingList list;
        list.query_id = "q";
        for (std::size_t i = 0; i < ls.size(); ++i) {
            MatchCandidate c;
            c.candidate_id = "c" + std::to_string(i);
            c.candidate_index = i;
            c.l = ls[i];
            c.t_i = 100;
            c.p = ls[i] / 100.0;
            list.candidates.push_back(std::move(c));
        }
        return list;
    };

    int problems = 0;
    std::ostringstream why;

    const MatchingList trace = list_from_l({50, 48, 40, 35, 30, 28, 27, 2});
    const MatchingList trace_filtered = filter_matches(trace, FilterParams{});
    if (trace_filtered.n() != 7 ||
        trace_filtered.candidates.back().candidate_id != "c6") {
        ++problems;
        why << "worked trace accepted " << trace_filtered.n() << " of 8; ";
    }

    if (filter_matches(list_from_l({30, 30, 30}), FilterParams{}).n() != 3) {
        ++problems;
        why << "all-equal list was cut; ";
    }
    if (filter_matches(list_from_l({17}), FilterParams{}).n() != 1) {
        ++problems;
        why << "single-candidate list was cut; ";
    }

    Rng rng(0xACC8);
    for (int round = 0; round < 500; ++round) {
        const int n = static_cast<int>(rng.uniform_int(1, 12));
        std::vector<int> ls;
        for (int i = 0; i < n; ++i) ls.push_back(static_cast<int>(rng.uniform_int(1, 100)));
        std::sort(ls.rbegin(), ls.rend());
        const MatchingList list = list_from_l(ls);
        FilterParams params;
        params.t_d = rng.uniform(-0.5, -0.01);
        const MatchingList filtered = filter_matches(list, params);

        bool prefix = filtered.n() <= list.n();
        for (std::size_t i = 0; prefix && i < filtered.n(); ++i)
            prefix = filtered.candidates[i].candidate_id == list.candidates[i].candidate_id;
        if (!prefix) {
            ++problems;
            why << "prefix violated at round " << round << "; ";
            break;
        }
        FilterParams stricter = params;
        stricter.t_d = params.t_d - rng.uniform(0.0, 0.5);
        if (filter_matches(list, stricter).n() < filtered.n()) {
            ++problems;
            why << "t_d monotonicity violated at round " << round << "; ";
            break;
        }
    }

    detail = problems == 0 ? "worked trace, degenerate lists, 500 random sequences"
                           : why.str();
    return problems == 0;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_work");
    fs::remove_all(work);
    fs::create_directories(work);

    PipelineConfig config;
    CorpusSpec spec;  // the seeded default corpus

    std::printf("-- generating corpus (seed %llu, %d songs)...\n",
                static_cast<unsigned long long>(spec.seed), spec.n_songs);
    const fs::path corpus_a = work / "corpus_a";
    const GroundTruthManifest manifest = generate_corpus(spec, corpus_a);
    std::printf("-- %zu clips\n", manifest.clips.size());

    std::printf("-- ingesting...\n");
    MatchDb db;
    {
        std::ostringstream log;
        const IngestStats stats = ingest_directory(corpus_a, config, db, log);
        std::fputs(log.str().c_str(), stdout);
        std::printf("-- ingested %zu clips, %zu landmarks\n", stats.ingested,
                    stats.total_landmarks);
        db.save_file(work / "db_a.cldb");
    }

    // run 1: plain organise with filtering
    std::printf("-- organise (filtering, no injections)...\n");
    const auto organise_start = std::chrono::steady_clock::now();
    OrganiseOptions plain;
    plain.manifest = manifest;
    const OrganiseResult run1 = organise(db, config, plain);
    const double organise_seconds = seconds_since(organise_start);
    const fs::path reports1 = work / "reports_filtered";
    write_organise_reports(run1, config, true, reports1);
    const Metrics m1 = evaluate_reports(reports1, manifest);
    m1.print(std::cout);
    write_metrics_json(reports1 / "metrics.json", m1);

    {
        std::ostringstream detail;
        detail << m1.n_clusters << " clusters, purity " << m1.purity << ", "
               << m1.wrongly_merged << " merged, organise took " << organise_seconds
               << " s";
        report(1, "cluster exactness with filtering",
               m1.n_clusters == spec.n_songs && m1.purity == 1.0 &&
                   m1.wrongly_merged == 0 && organise_seconds < 120.0,
               detail.str());
    }

    // runs 2 and 3: injected false positives, with and without filtering
    std::printf("-- organise (injected FPs, filtering on / off)...\n");
    OrganiseOptions injected;
    injected.manifest = manifest;
    injected.injections.sample_level = 4;
    injected.injections.landmark_level = 5;
    injected.inject_seed = 7;

    const OrganiseResult run2 = organise(db, config, injected);
    const fs::path reports2 = work / "reports_injected_filtered";
    write_organise_reports(run2, config, true, reports2);
    const GroundTruthManifest injected_manifest =
        GroundTruthManifest::load(reports2 / "manifest.json");
    const Metrics m2 = evaluate_reports(reports2, injected_manifest);
    write_metrics_json(reports2 / "metrics.json", m2);

    OrganiseOptions injected_nofilter = injected;
    injected_nofilter.filtering_enabled = false;
    const OrganiseResult run3 = organise(db, config, injected_nofilter);
    const fs::path reports3 = work / "reports_injected_nofilter";
    write_organise_reports(run3, config, false, reports3);
    const Metrics m3 = evaluate_reports(reports3, injected_manifest);
    write_metrics_json(reports3 / "metrics.json", m3);

    {
        std::ostringstream detail;
        detail << "no-filter: " << m3.n_clusters << " clusters; filtered: "
               << m2.n_clusters << " clusters";
        report(2, "filtering ablation restores the clusters",
               m3.n_clusters < spec.n_songs && m2.n_clusters == spec.n_songs,
               detail.str());
    }
    {
        std::ostringstream detail;
        detail << "sample-level " << m2.sample_level_fp.removed << "/"
               << m2.sample_level_fp.injected << ", landmark-level "
               << m2.landmark_level_fp.removed << "/" << m2.landmark_level_fp.injected
               << " (no-filter removal: " << m3.sample_level_fp.removed << "+"
               << m3.landmark_level_fp.removed << ")";
        report(3, "injected false positives are all removed",
               m2.sample_level_fp.injected == 4 && m2.sample_level_fp.removed == 4 &&
                   m2.landmark_level_fp.injected == 5 && m2.landmark_level_fp.removed == 5,
               detail.str());
    }
    {
        std::ostringstream detail;
        detail << "FN rate " << 100.0 * m1.false_negative_rate << "% ("
               << m1.true_matches_rejected << "/" << m1.true_matches_listed
               << "), clusters intact: " << (m1.n_clusters == spec.n_songs ? "yes" : "no");
        report(4, "false negatives stay within tolerance",
               m1.false_negative_rate <= 0.15 && m1.n_clusters == spec.n_songs,
               detail.str());
    }
    {
        std::ostringstream detail;
        detail << m1.offsets_within_tolerance << "/" << m1.offsets_checked
               << " within " << m1.offset_tolerance_s << " s, max error "
               << m1.max_offset_error_s << " s";
        report(5, "offset recovery within two frames",
               m1.offsets_checked > 0 &&
                   m1.offsets_within_tolerance == m1.offsets_checked,
               detail.str());
    }
    {
        bool rank_vs_km = true;
        for (const ReferenceRank& r : m1.reference_ranks)
            if (r.rank_proposed > r.km_rank_lo) rank_vs_km = false;
        std::ostringstream detail;
        detail << "rank 1 in " << m1.reference_rank1_proposed << "/"
               << m1.reference_ranks.size() << " clusters, km tie groups "
               << m1.km_tie_groups << ", proposed tie groups " << m1.proposed_tie_groups;
        report(6, "reference ranks at the top under the proposed score",
               static_cast<int>(m1.reference_ranks.size()) == spec.n_songs &&
                   m1.reference_rank1_proposed >= 8 && rank_vs_km &&
                   m1.km_tie_groups >= 1 && m1.proposed_tie_groups <= 1,
               detail.str());
    }

    // criterion 7: oracle equivalence
    {
        const int peaks = oracle_peaks_mismatches(200);
        const int pairs = oracle_pairing_mismatches(200);
        const int queries = oracle_query_mismatches(50);
        const int dedupes = oracle_dedupe_mismatches(200);
        const int components = oracle_components_mismatches(200);
        const int scores = oracle_score_mismatches(100);
        std::ostringstream detail;
        detail << "mismatches: peaks " << peaks << ", pairing " << pairs << ", query "
               << queries << ", dedupe " << dedupes << ", components " << components
               << ", scores " << scores;
        report(7, "oracle equivalence suites",
               peaks + pairs + queries + dedupes + components + scores == 0,
               detail.str());
    }

    // criterion 8: filter rule unit suite
    {
        std::string detail;
        const bool ok = filter_rule_suite(detail);
        report(8, "filter rule unit suite", ok, detail);
    }

    // criterion 9: byte-identical second run
    {
        std::printf("-- repeating the full pipeline for determinism...\n");
        const fs::path corpus_b = work / "corpus_b";
        const GroundTruthManifest manifest_b = generate_corpus(spec, corpus_b);

        bool same = same_bytes(corpus_a / "manifest.json", corpus_b / "manifest.json");
        for (const ClipTruth& clip : manifest.clips)
            if (same && !same_bytes(corpus_a / (clip.clip_id + ".wav"),
                                    corpus_b / (clip.clip_id + ".wav")))
                same = false;

        MatchDb db_b;
        std::ostringstream log;
        ingest_directory(corpus_b, config, db_b, log);
        db_b.save_file(work / "db_b.cldb");
        if (!same_bytes(work / "db_a.cldb", work / "db_b.cldb")) same = false;

        OrganiseOptions plain_b;
        plain_b.manifest = manifest_b;
        const OrganiseResult run_b = organise(db_b, config, plain_b);
        const fs::path reports_b = work / "reports_b";
        write_organise_reports(run_b, config, true, reports_b);
        for (const char* name : {"clusters.json", "rankings.json", "rankings.csv",
                                 "graph.csv", "filter_decisions.json"})
            if (same && !same_bytes(reports1 / name, reports_b / name)) same = false;

        report(9, "two seeded runs are byte-identical", same,
               same ? "corpus, db file and all reports match" : "divergence found");
        fs::remove_all(corpus_b);
    }

    std::printf("%d of 9 criteria passed\n", 9 - g_failures);
    if (g_failures == 0) fs::remove_all(corpus_a);  // keep the reports, drop the audio
    return g_failures;
}
