#pragma once

#include <cstdint>
#include <vector>

#include "cliporg/peaks.hpp"

namespace cliporg {

/// A pair of spectral peaks: the anchor's frequency bin f1 and frame t1, the
/// paired peak's bin f2, and the positive frame offset dt between them.
struct Landmark {
    int f1 = 0;
    int f2 = 0;
    int t1 = 0;
    int dt = 0;

    bool operator==(const Landmark&) const = default;
};

struct PairingParams {
    int fan_out = 3;   // pairs per anchor
    int dt_max = 63;   // frames; must fit the 6-bit hash field
    int df_max = 31;   // bins; must fit the 6-bit (shifted) hash field
};

/// Pairs each anchor peak with up to fan_out subsequent peaks inside the
/// target zone {1 <= dframe <= dt_max, |dbin| <= df_max}, nearest in time
/// first (ties: smaller |dbin|, then smaller bin). Peaks must be sorted by
/// (frame, bin). Deterministic.
std::vector<Landmark> pair_landmarks(const std::vector<Peak>& peaks,
                                     const PairingParams& params);

using HashKey = std::uint32_t;

/// Packs (f1, f2 - f1 + df_max, dt) into 9 + 6 + 6 bits:
/// key = (f1 << 12) | ((f2 - f1 + df_max) << 6) | dt.
/// Injective over f1 < 512, |f2 - f1| <= df_max <= 31, 1 <= dt <= 63;
/// fields outside those ranges raise RangeError.
HashKey hash_landmark(const Landmark& lm, int df_max = 31);

}  // namespace cliporg
