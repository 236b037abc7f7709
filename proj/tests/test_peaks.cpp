#include <doctest.h>

#include "cliporg/peaks.hpp"
#include "cliporg/rng.hpp"

#include "test_support.hpp"

using namespace cliporg;
using testsupport::make_spec;

namespace {

bool same_peaks(const std::vector<Peak>& a, const std::vector<Peak>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].frame != b[i].frame || a[i].bin != b[i].bin) return false;
    return true;
}

}  // namespace

TEST_CASE("peaks: a single nonzero cell is the only peak") {
    std::vector<std::vector<float>> grid(3, std::vector<float>(9, 0.0f));
    grid[1][4] = 1.5f;
    const auto peaks = extract_peaks(make_spec(grid), PeakParams{2, 2, 5, 1e-6f});
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].frame == 1);
    CHECK(peaks[0].bin == 4);
    CHECK(peaks[0].magnitude == 1.5f);
}

TEST_CASE("peaks: frequency-edge cells are not eligible") {
    // a lone maximum inside the first neighborhood_bins rows is skipped
    std::vector<std::vector<float>> grid(3, std::vector<float>(9, 0.0f));
    grid[1][0] = 2.0f;
    grid[1][8] = 2.0f;
    CHECK(extract_peaks(make_spec(grid), PeakParams{2, 2, 5, 1e-6f}).empty());
}

TEST_CASE("peaks: a constant grid has no strict maxima") {
    auto spec = make_spec(std::vector<std::vector<float>>(6, std::vector<float>(6, 0.8f)));
    CHECK(extract_peaks(spec, PeakParams{2, 2, 5, 1e-6f}).empty());
}

TEST_CASE("peaks: the magnitude floor rejects numerical dust") {
    auto spec = make_spec({{0, 0, 0}, {0, 9e-7f, 0}, {0, 0, 0}});
    CHECK(extract_peaks(spec, PeakParams{1, 1, 5, 1e-6f}).empty());
}

TEST_CASE("peaks: empty spectrogram yields no peaks") {
    Spectrogram spec;
    CHECK(extract_peaks(spec, PeakParams{}).empty());
}

TEST_CASE("peaks: max_per_frame keeps the strongest, lower bins on ties") {
    // one frame, peaks far enough apart not to suppress each other
    std::vector<std::vector<float>> grid(1, std::vector<float>(40, 0.0f));
    grid[0][5] = 0.5f;
    grid[0][13] = 0.9f;
    grid[0][21] = 0.5f;
    grid[0][29] = 0.7f;
    auto spec = make_spec(grid);
    const auto peaks = extract_peaks(spec, PeakParams{1, 3, 3, 1e-6f});
    REQUIRE(peaks.size() == 3);
    CHECK(peaks[0].bin == 5);   // 0.5 beats the 0.5 at bin 21 by bin order
    CHECK(peaks[1].bin == 13);
    CHECK(peaks[2].bin == 29);
}

TEST_CASE("peaks: equals the exhaustive neighborhood-scan oracle") {
    Rng rng(101);
    for (int round = 0; round < 200; ++round) {
        const auto frames = static_cast<std::size_t>(rng.uniform_int(1, 50));
        const auto bins = static_cast<std::size_t>(rng.uniform_int(1, 50));
        std::vector<std::vector<float>> grid(frames, std::vector<float>(bins));
        for (auto& row : grid)
            for (auto& v : row) {
                v = static_cast<float>(rng.uniform(0.0, 2.0));
                // encourage plateau ties so strictness is actually exercised
                if (rng.uniform_int(0, 4) == 0) v = 1.0f;
            }
        auto spec = make_spec(grid);
        PeakParams params;
        params.neighborhood_frames = static_cast<int>(rng.uniform_int(1, 4));
        params.neighborhood_bins = static_cast<int>(rng.uniform_int(1, 4));
        params.max_per_frame = static_cast<int>(rng.uniform_int(1, 6));
        const auto actual = extract_peaks(spec, params);
        const auto expected = testsupport::oracle_peaks(spec, params);
        REQUIRE(same_peaks(actual, expected));
    }
}

TEST_CASE("peaks: output is sorted by (frame, bin)") {
    Rng rng(7);
    std::vector<std::vector<float>> grid(30, std::vector<float>(30));
    for (auto& row : grid)
        for (auto& v : row) v = static_cast<float>(rng.uniform(0.0, 1.0));
    const auto peaks = extract_peaks(make_spec(grid), PeakParams{2, 2, 5, 1e-6f});
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        const bool ordered = peaks[i - 1].frame < peaks[i].frame ||
                             (peaks[i - 1].frame == peaks[i].frame &&
                              peaks[i - 1].bin < peaks[i].bin);
        CHECK(ordered);
    }
}
