#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "cliporg/fingerprint.hpp"

namespace cliporg {

/// Landmarks of one candidate that matched a query at one time offset.
struct OffsetGroup {
    std::string candidate_id;
    std::size_t candidate_index = 0;   // db insertion order
    std::int64_t offset_frames = 0;    // query t1 - candidate t1
    int l = 0;                         // matching landmarks at this offset
};

/// One query's per-offset match groups; a candidate may appear under several
/// offsets here (the downstream filter collapses those).
struct RawMatchingList {
    std::string query_id;
    std::vector<OffsetGroup> groups;  // (l desc, candidate insertion order, offset asc)
};

/// Inverted index over landmark hashes plus the stored fingerprints.
///
/// Duplicate landmarks (same hash, same t1) within one fingerprint are
/// indexed once; they carry no extra match evidence. Single writer during
/// the build phase, then any number of concurrent readers.
class MatchDb {
public:
    explicit MatchDb(int df_max = 31) : df_max_(df_max) {}

    /// Throws InputError if the sample id is already present.
    void insert(Fingerprint fp);

    /// All per-offset groups with at least t_l matching landmarks, the
    /// query's own id excluded. Groups are sorted by (l desc, candidate
    /// insertion order, offset asc).
    RawMatchingList query(const Fingerprint& fp, int t_l) const;

    std::size_t size() const { return fingerprints_.size(); }
    bool contains(const std::string& id) const { return by_id_.count(id) > 0; }
    std::size_t index_of(const std::string& id) const;
    const Fingerprint& fingerprint(std::size_t index) const { return fingerprints_[index]; }
    const std::vector<Fingerprint>& fingerprints() const { return fingerprints_; }
    std::vector<std::string> ids() const;
    int df_max() const { return df_max_; }

    /// Total number of (hash, t1) entries in the inverted index.
    std::size_t index_entries() const;

    // Database file: magic "CLDB", u16 version, then the fingerprint records
    // back to back. The inverted index is derived data and is rebuilt on load.
    void save(std::ostream& out) const;
    static MatchDb load(std::istream& in, int df_max = 31);
    void save_file(const std::filesystem::path& path) const;
    static MatchDb load_file(const std::filesystem::path& path, int df_max = 31);

private:
    struct Posting {
        std::uint32_t sample;
        std::uint32_t t1;
    };

    void index_fingerprint(std::size_t sample_index);

    int df_max_;
    std::vector<Fingerprint> fingerprints_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<HashKey, std::vector<Posting>> index_;
};

inline constexpr std::uint16_t kMatchDbFormatVersion = 1;

/// Converts an offset group's frame offset to seconds.
double offset_seconds(std::int64_t offset_frames, const StftParams& params, int rate);

}  // namespace cliporg
