#include "cliporg/match_db.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "cliporg/errors.hpp"

namespace cliporg {

void MatchDb::insert(Fingerprint fp) {
    if (by_id_.count(fp.sample_id))
        throw InputError("match_db: duplicate sample id '" + fp.sample_id + "'");
    const std::size_t idx = fingerprints_.size();
    by_id_.emplace(fp.sample_id, idx);
    fingerprints_.push_back(std::move(fp));
    index_fingerprint(idx);
}

void MatchDb::index_fingerprint(std::size_t sample_index) {
    const Fingerprint& fp = fingerprints_[sample_index];
    std::set<std::pair<HashKey, std::uint32_t>> seen;
    for (const Landmark& lm : fp.landmarks) {
        const HashKey key = hash_landmark(lm, df_max_);
        const auto t1 = static_cast<std::uint32_t>(lm.t1);
        if (!seen.emplace(key, t1).second) continue;
        index_[key].push_back({static_cast<std::uint32_t>(sample_index), t1});
    }
}

std::size_t MatchDb::index_of(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw InputError("match_db: unknown sample id '" + id + "'");
    return it->second;
}

std::vector<std::string> MatchDb::ids() const {
    std::vector<std::string> out;
    out.reserve(fingerprints_.size());
    for (const auto& fp : fingerprints_) out.push_back(fp.sample_id);
    return out;
}

std::size_t MatchDb::index_entries() const {
    std::size_t n = 0;
    for (const auto& [key, postings] : index_) n += postings.size();
    return n;
}

RawMatchingList MatchDb::query(const Fingerprint& fp, int t_l) const {
    if (t_l < 1) throw RangeError("match_db: t_l must be >= 1");

    RawMatchingList result;
    result.query_id = fp.sample_id;

    // Distinct (hash, t1) entries only, mirroring the indexing rule.
    std::set<std::pair<HashKey, std::uint32_t>> query_entries;
    for (const Landmark& lm : fp.landmarks)
        query_entries.emplace(hash_landmark(lm, df_max_),
                              static_cast<std::uint32_t>(lm.t1));

    // (candidate, offset) -> matching landmark count
    std::map<std::pair<std::uint32_t, std::int64_t>, int> buckets;
    for (const auto& [key, t1q] : query_entries) {
        auto it = index_.find(key);
        if (it == index_.end()) continue;
        for (const Posting& posting : it->second) {
            const std::int64_t offset =
                static_cast<std::int64_t>(t1q) - static_cast<std::int64_t>(posting.t1);
            ++buckets[{posting.sample, offset}];
        }
    }

    for (const auto& [key, count] : buckets) {
        const auto [sample, offset] = key;
        if (count < t_l) continue;
        const Fingerprint& cand = fingerprints_[sample];
        if (cand.sample_id == fp.sample_id) continue;
        result.groups.push_back({cand.sample_id, sample, offset, count});
    }

    std::sort(result.groups.begin(), result.groups.end(),
              [](const OffsetGroup& a, const OffsetGroup& b) {
                  if (a.l != b.l) return a.l > b.l;
                  if (a.candidate_index != b.candidate_index)
                      return a.candidate_index < b.candidate_index;
                  return a.offset_frames < b.offset_frames;
              });
    return result;
}

void MatchDb::save(std::ostream& out) const {
    out.write("CLDB", 4);
    const char version[2] = {static_cast<char>(kMatchDbFormatVersion & 0xff),
                             static_cast<char>(kMatchDbFormatVersion >> 8)};
    out.write(version, 2);
    for (const Fingerprint& fp : fingerprints_) write_fingerprint(out, fp);
}

MatchDb MatchDb::load(std::istream& in, int df_max) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "CLDB")
        throw DecodeError("match_db: bad magic (expected CLDB)");
    unsigned char vbytes[2];
    in.read(reinterpret_cast<char*>(vbytes), 2);
    if (!in) throw DecodeError("match_db: truncated version");
    const std::uint16_t version = static_cast<std::uint16_t>(vbytes[0] | (vbytes[1] << 8));
    if (version != kMatchDbFormatVersion)
        throw DecodeError("match_db: unsupported format version " + std::to_string(version));

    MatchDb db(df_max);
    while (in.peek() != std::char_traits<char>::eof()) {
        db.insert(read_fingerprint(in));
    }
    return db;
}

void MatchDb::save_file(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    save(out);
    if (!out) throw InputError("short write to " + path.string());
}

MatchDb MatchDb::load_file(const std::filesystem::path& path, int df_max) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return load(in, df_max);
}

double offset_seconds(std::int64_t offset_frames, const StftParams& params, int rate) {
    return static_cast<double>(offset_frames) * params.hop_size / rate;
}

}  // namespace cliporg
