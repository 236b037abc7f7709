#include "cliporg/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cliporg/errors.hpp"

namespace cliporg {

namespace {

using nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("short write to " + path.string());
}

json load_json_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DecodeError(path.string() + ": not valid JSON: " + e.what());
    }
    int version = -1;
    if (j.contains("schema_version")) version = j["schema_version"].get<int>();
    if (version != kReportSchemaVersion)
        throw InputError(path.string() + ": schema version " + std::to_string(version) +
                         " does not match expected " +
                         std::to_string(kReportSchemaVersion));
    return j;
}

std::string format_seconds(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_clusters_json(const std::filesystem::path& path, const MatchGraph& graph,
                         const ClusterSet& clusters,
                         const std::vector<std::vector<double>>& positions) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    auto& arr = j["clusters"] = json::array();
    for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
        json members = json::array();
        for (std::size_t m = 0; m < clusters.clusters[c].size(); ++m) {
            members.push_back(
                {{"sample_id", graph.vertex_ids[clusters.clusters[c][m]]},
                 {"timeline_position_s", positions[c][m]}});
        }
        arr.push_back({{"cluster_id", c}, {"members", std::move(members)}});
    }
    auto& unmatched = j["unmatched"] = json::array();
    for (const std::size_t v : clusters.unmatched) unmatched.push_back(graph.vertex_ids[v]);
    j["warnings"] = graph.warnings;
    write_text_file(path, j.dump(2) + "\n");
}

namespace {

json ranking_entry_to_json(const QualityScore& s) {
    return {{"sample_id", s.sample_id},
            {"proposed_score", s.proposed_score},
            {"rank_proposed", s.rank_proposed},
            {"proposed_tie", s.proposed_tie},
            {"km_score", s.km_score},
            {"km_rank_lo", s.km_rank_lo},
            {"km_rank_hi", s.km_rank_hi},
            {"is_reference", s.is_reference}};
}

}  // namespace

void write_rankings_json(const std::filesystem::path& path,
                         const std::vector<std::vector<QualityScore>>& rankings) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    auto& arr = j["clusters"] = json::array();
    for (std::size_t c = 0; c < rankings.size(); ++c) {
        json entries = json::array();
        for (const QualityScore& s : rankings[c]) entries.push_back(ranking_entry_to_json(s));
        arr.push_back({{"cluster_id", c}, {"entries", std::move(entries)}});
    }
    write_text_file(path, j.dump(2) + "\n");
}

void write_rankings_csv(const std::filesystem::path& path,
                        const std::vector<std::vector<QualityScore>>& rankings) {
    std::ostringstream out;
    out << "cluster_id,sample_id,proposed_score,rank_proposed,proposed_tie,"
           "km_score,km_rank_lo,km_rank_hi,is_reference\n";
    for (std::size_t c = 0; c < rankings.size(); ++c)
        for (const QualityScore& s : rankings[c])
            out << c << ',' << s.sample_id << ',' << s.proposed_score << ','
                << s.rank_proposed << ',' << (s.proposed_tie ? 1 : 0) << ',' << s.km_score
                << ',' << s.km_rank_lo << ',' << s.km_rank_hi << ','
                << (s.is_reference ? 1 : 0) << '\n';
    write_text_file(path, out.str());
}

void write_graph_csv(const std::filesystem::path& path, const MatchGraph& graph) {
    std::ostringstream out;
    out << "a,b,offset_s,l_ab\n";
    for (const GraphEdge& e : graph.edges)
        out << graph.vertex_ids[e.a] << ',' << graph.vertex_ids[e.b] << ','
            << format_seconds(e.offset_s) << ',' << e.evidence_l << '\n';
    write_text_file(path, out.str());
}

void write_filter_decisions_json(const std::filesystem::path& path,
                                 const std::vector<FilterResult>& filtered,
                                 const FilterParams& params, bool filtering_enabled,
                                 double frame_duration_s) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["filtering_enabled"] = filtering_enabled;
    j["t_l"] = params.t_l;
    j["t_d"] = params.t_d;
    j["strict_drop_edge"] = params.strict_drop_edge;
    j["frame_duration_s"] = frame_duration_s;
    auto& queries = j["queries"] = json::array();
    for (const FilterResult& result : filtered) {
        json candidates = json::array();
        for (const MatchDecision& d : result.decisions) {
            candidates.push_back(
                {{"candidate_id", d.candidate.candidate_id},
                 {"l", d.candidate.l},
                 {"t_i", d.candidate.t_i},
                 {"p", d.candidate.p},
                 {"offset_frames", d.candidate.offset_frames},
                 {"offset_s", d.candidate.offset_frames * frame_duration_s},
                 {"accepted", d.accepted},
                 {"reason", to_string(d.fate)}});
        }
        queries.push_back(
            {{"query_id", result.accepted.query_id}, {"candidates", std::move(candidates)}});
    }
    write_text_file(path, j.dump(2) + "\n");
}

namespace {

struct DecisionEntry {
    std::string candidate_id;
    int l = 0;
    std::int64_t offset_frames = 0;
    double offset_s = 0.0;
    bool accepted = false;
    std::string reason;
};

struct DecisionsReport {
    bool filtering_enabled = true;
    double frame_duration_s = 0.0;
    std::vector<std::pair<std::string, std::vector<DecisionEntry>>> queries;
};

struct RankingEntry {
    std::string sample_id;
    long long proposed_score = 0;
    int rank_proposed = 0;
    bool proposed_tie = false;
    int km_score = 0;
    int km_rank_lo = 0;
    int km_rank_hi = 0;
};

struct ReportData {
    std::vector<std::vector<std::pair<std::string, double>>> clusters;  // id, position
    std::vector<std::string> unmatched;
    std::vector<std::vector<RankingEntry>> rankings;
    DecisionsReport decisions;
};

ReportData read_reports(const std::filesystem::path& dir) {
    ReportData data;
    try {
        const json clusters = load_json_report(dir / "clusters.json");
        for (const auto& c : clusters.at("clusters")) {
            std::vector<std::pair<std::string, double>> members;
            for (const auto& m : c.at("members"))
                members.emplace_back(m.at("sample_id").get<std::string>(),
                                     m.at("timeline_position_s").get<double>());
            data.clusters.push_back(std::move(members));
        }
        for (const auto& u : clusters.at("unmatched"))
            data.unmatched.push_back(u.get<std::string>());

        const json rankings = load_json_report(dir / "rankings.json");
        for (const auto& c : rankings.at("clusters")) {
            std::vector<RankingEntry> entries;
            for (const auto& e : c.at("entries")) {
                RankingEntry entry;
                entry.sample_id = e.at("sample_id").get<std::string>();
                entry.proposed_score = e.at("proposed_score").get<long long>();
                entry.rank_proposed = e.at("rank_proposed").get<int>();
                entry.proposed_tie = e.at("proposed_tie").get<bool>();
                entry.km_score = e.at("km_score").get<int>();
                entry.km_rank_lo = e.at("km_rank_lo").get<int>();
                entry.km_rank_hi = e.at("km_rank_hi").get<int>();
                entries.push_back(std::move(entry));
            }
            data.rankings.push_back(std::move(entries));
        }

        const json decisions = load_json_report(dir / "filter_decisions.json");
        data.decisions.filtering_enabled = decisions.at("filtering_enabled").get<bool>();
        data.decisions.frame_duration_s = decisions.at("frame_duration_s").get<double>();
        for (const auto& q : decisions.at("queries")) {
            std::vector<DecisionEntry> entries;
            for (const auto& c : q.at("candidates")) {
                DecisionEntry entry;
                entry.candidate_id = c.at("candidate_id").get<std::string>();
                entry.l = c.at("l").get<int>();
                entry.offset_frames = c.at("offset_frames").get<std::int64_t>();
                entry.offset_s = c.at("offset_s").get<double>();
                entry.accepted = c.at("accepted").get<bool>();
                entry.reason = c.at("reason").get<std::string>();
                entries.push_back(std::move(entry));
            }
            data.decisions.queries.emplace_back(q.at("query_id").get<std::string>(),
                                                std::move(entries));
        }
    } catch (const json::exception& e) {
        throw DecodeError("eval: malformed report field: " + std::string(e.what()));
    }
    return data;
}

}  // namespace

Metrics evaluate_reports(const std::filesystem::path& reports_dir,
                         const GroundTruthManifest& manifest) {
    const ReportData data = read_reports(reports_dir);

    std::map<std::string, const ClipTruth*> truth;
    for (const ClipTruth& c : manifest.clips) truth[c.clip_id] = &c;

    // The reports and the manifest must describe the same sample set.
    std::set<std::string> report_ids(data.unmatched.begin(), data.unmatched.end());
    for (const auto& cluster : data.clusters)
        for (const auto& [id, pos] : cluster) report_ids.insert(id);
    std::vector<std::string> not_in_manifest, not_in_reports;
    for (const std::string& id : report_ids)
        if (!truth.count(id)) not_in_manifest.push_back(id);
    for (const auto& [id, t] : truth)
        if (!report_ids.count(id)) not_in_reports.push_back(id);
    if (!not_in_manifest.empty() || !not_in_reports.empty()) {
        std::ostringstream msg;
        msg << "eval: reports and manifest disagree on sample ids;";
        if (!not_in_manifest.empty()) {
            msg << " unknown to manifest:";
            for (const auto& id : not_in_manifest) msg << ' ' << id;
            msg << ';';
        }
        if (!not_in_reports.empty()) {
            msg << " missing from reports:";
            for (const auto& id : not_in_reports) msg << ' ' << id;
        }
        throw InputError(msg.str());
    }

    Metrics m;
    m.filtering_enabled = data.decisions.filtering_enabled;
    m.n_clusters = static_cast<int>(data.clusters.size());
    m.n_unmatched = static_cast<int>(data.unmatched.size());
    m.offset_tolerance_s = 2.0 * data.decisions.frame_duration_s;

    // cluster purity / splits / merges
    std::map<std::string, std::set<std::size_t>> song_clusters;
    std::size_t clustered_samples = 0;
    double weighted_purity = 0.0;
    for (std::size_t ci = 0; ci < data.clusters.size(); ++ci) {
        std::map<std::string, int> by_song;
        for (const auto& [id, pos] : data.clusters[ci]) {
            const std::string& song = truth.at(id)->song_id;
            ++by_song[song];
            song_clusters[song].insert(ci);
        }
        int dominant = 0;
        for (const auto& [song, count] : by_song) dominant = std::max(dominant, count);
        if (by_song.size() > 1) ++m.wrongly_merged;
        weighted_purity += dominant;
        clustered_samples += data.clusters[ci].size();
    }
    m.purity = clustered_samples > 0 ? weighted_purity / static_cast<double>(clustered_samples)
                                     : 1.0;
    for (const auto& [song, cs] : song_clusters)
        if (cs.size() > 1) ++m.wrongly_split;

    // injected false positives: did the filter drop them?
    std::set<std::pair<std::string, std::string>> injected_sample_pairs;
    std::set<std::tuple<std::string, std::string, std::int64_t, int>> injected_landmark_groups;
    for (const InjectedFp& fp : manifest.injected) {
        if (fp.kind == FpKind::sample_level)
            injected_sample_pairs.insert({fp.query_id, fp.phantom_candidate_id});
        else
            injected_landmark_groups.insert(
                {fp.query_id, fp.phantom_candidate_id, fp.offset_frames, fp.l});
    }

    std::map<std::string, const std::vector<DecisionEntry>*> decisions_by_query;
    for (const auto& [query_id, entries] : data.decisions.queries)
        decisions_by_query[query_id] = &entries;

    for (const InjectedFp& fp : manifest.injected) {
        auto it = decisions_by_query.find(fp.query_id);
        const std::vector<DecisionEntry>* entries =
            it != decisions_by_query.end() ? it->second : nullptr;
        bool accepted = false;
        if (entries) {
            for (const DecisionEntry& e : *entries) {
                if (!e.accepted || e.candidate_id != fp.phantom_candidate_id) continue;
                if (fp.kind == FpKind::sample_level ||
                    (e.offset_frames == fp.offset_frames && e.l == fp.l)) {
                    accepted = true;
                    break;
                }
            }
        }
        RemovalStats& stats =
            fp.kind == FpKind::sample_level ? m.sample_level_fp : m.landmark_level_fp;
        ++stats.injected;
        if (!accepted) ++stats.removed;
    }

    // true matches, false negatives, offset recovery
    for (const auto& [query_id, entries] : data.decisions.queries) {
        const ClipTruth* query_truth = truth.at(query_id);
        for (const DecisionEntry& e : *decisions_by_query.at(query_id)) {
            if (e.reason == "dedup_loser") continue;
            if (injected_sample_pairs.count({query_id, e.candidate_id})) continue;
            if (injected_landmark_groups.count(
                    {query_id, e.candidate_id, e.offset_frames, e.l}))
                continue;
            const ClipTruth* cand_truth = truth.at(e.candidate_id);
            if (cand_truth->song_id != query_truth->song_id) {
                ++m.cross_song_listed;
                if (e.accepted) ++m.cross_song_accepted;
                continue;
            }
            ++m.true_matches_listed;
            if (!e.accepted) {
                ++m.true_matches_rejected;
                continue;
            }
            ++m.true_matches_accepted;
            const double expected = cand_truth->crop_start_s - query_truth->crop_start_s;
            const double error = std::abs(e.offset_s - expected);
            ++m.offsets_checked;
            m.max_offset_error_s = std::max(m.max_offset_error_s, error);
            if (error <= m.offset_tolerance_s) ++m.offsets_within_tolerance;
        }
    }
    m.false_negative_rate =
        m.true_matches_listed > 0
            ? static_cast<double>(m.true_matches_rejected) / m.true_matches_listed
            : 0.0;

    // reference positions and tie structure per cluster
    for (std::size_t ci = 0; ci < data.rankings.size(); ++ci) {
        const auto& entries = data.rankings[ci];
        std::map<std::pair<int, int>, int> km_ranges;
        std::map<long long, int> proposed_counts;
        for (const RankingEntry& e : entries) {
            ++km_ranges[{e.km_rank_lo, e.km_rank_hi}];
            ++proposed_counts[e.proposed_score];
            const ClipTruth* t = truth.at(e.sample_id);
            if (t->is_reference) {
                ReferenceRank r;
                r.song_id = t->song_id;
                r.sample_id = e.sample_id;
                r.cluster_id = static_cast<int>(ci);
                r.cluster_size = static_cast<int>(entries.size());
                r.rank_proposed = e.rank_proposed;
                r.proposed_tie = e.proposed_tie;
                r.km_rank_lo = e.km_rank_lo;
                r.km_rank_hi = e.km_rank_hi;
                m.reference_ranks.push_back(std::move(r));
                if (e.rank_proposed == 1) ++m.reference_rank1_proposed;
            }
        }
        for (const auto& [range, count] : km_ranges)
            if (range.first < range.second && count >= 2) ++m.km_tie_groups;
        for (const auto& [score, count] : proposed_counts)
            if (count >= 2) ++m.proposed_tie_groups;
    }

    return m;
}

std::string Metrics::to_json() const {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["filtering_enabled"] = filtering_enabled;
    j["n_clusters"] = n_clusters;
    j["n_unmatched"] = n_unmatched;
    j["purity"] = purity;
    j["wrongly_merged"] = wrongly_merged;
    j["wrongly_split"] = wrongly_split;
    j["fp_removal"] = {{"sample_level",
                        {{"injected", sample_level_fp.injected},
                         {"removed", sample_level_fp.removed},
                         {"rate", sample_level_fp.rate()}}},
                       {"landmark_level",
                        {{"injected", landmark_level_fp.injected},
                         {"removed", landmark_level_fp.removed},
                         {"rate", landmark_level_fp.rate()}}}};
    j["true_matches"] = {{"listed", true_matches_listed},
                         {"accepted", true_matches_accepted},
                         {"rejected", true_matches_rejected},
                         {"false_negative_rate", false_negative_rate}};
    j["cross_song_listed"] = cross_song_listed;
    j["cross_song_accepted"] = cross_song_accepted;
    j["offsets"] = {{"tolerance_s", offset_tolerance_s},
                    {"checked", offsets_checked},
                    {"within_tolerance", offsets_within_tolerance},
                    {"max_error_s", max_offset_error_s}};
    auto& refs = j["reference_ranks"] = json::array();
    for (const ReferenceRank& r : reference_ranks) {
        refs.push_back({{"song_id", r.song_id},
                        {"sample_id", r.sample_id},
                        {"cluster_id", r.cluster_id},
                        {"cluster_size", r.cluster_size},
                        {"rank_proposed", r.rank_proposed},
                        {"proposed_tie", r.proposed_tie},
                        {"km_rank_lo", r.km_rank_lo},
                        {"km_rank_hi", r.km_rank_hi}});
    }
    j["reference_rank1_proposed"] = reference_rank1_proposed;
    j["km_tie_groups"] = km_tie_groups;
    j["proposed_tie_groups"] = proposed_tie_groups;
    return j.dump(2);
}

void Metrics::print(std::ostream& out) const {
    out << "clusters: " << n_clusters << " (unmatched samples: " << n_unmatched << ")\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "purity: %.4f (wrongly merged: %d, wrongly split: %d)\n",
                  purity, wrongly_merged, wrongly_split);
    out << buf;
    std::snprintf(buf, sizeof(buf), "sample-level FP removal: %d/%d (%.1f%%)\n",
                  sample_level_fp.removed, sample_level_fp.injected,
                  100.0 * sample_level_fp.rate());
    out << buf;
    std::snprintf(buf, sizeof(buf), "landmark-level FP removal: %d/%d (%.1f%%)\n",
                  landmark_level_fp.removed, landmark_level_fp.injected,
                  100.0 * landmark_level_fp.rate());
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "true matches: %d listed, %d accepted, %d rejected (FN rate %.2f%%)\n",
                  true_matches_listed, true_matches_accepted, true_matches_rejected,
                  100.0 * false_negative_rate);
    out << buf;
    std::snprintf(buf, sizeof(buf), "cross-song matches: %d listed, %d accepted\n",
                  cross_song_listed, cross_song_accepted);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "offsets: %d/%d within +/-%.4f s (max error %.4f s)\n",
                  offsets_within_tolerance, offsets_checked, offset_tolerance_s,
                  max_offset_error_s);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "reference proposed-rank 1 in %d/%zu clusters with a reference\n",
                  reference_rank1_proposed, reference_ranks.size());
    out << buf;
    out << "km tie groups: " << km_tie_groups
        << ", proposed tie groups: " << proposed_tie_groups << "\n";
}

void write_metrics_json(const std::filesystem::path& path, const Metrics& metrics) {
    write_text_file(path, metrics.to_json() + "\n");
}

}  // namespace cliporg
