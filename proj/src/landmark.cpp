#include "cliporg/landmark.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "cliporg/errors.hpp"

namespace cliporg {

std::vector<Landmark> pair_landmarks(const std::vector<Peak>& peaks,
                                     const PairingParams& params) {
    if (params.fan_out < 1) throw RangeError("pairing: fan_out must be >= 1");
    if (params.dt_max < 1) throw RangeError("pairing: dt_max must be >= 1");
    if (params.df_max < 0) throw RangeError("pairing: df_max must be >= 0");

    std::vector<Landmark> out;
    std::vector<const Peak*> candidates;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const Peak& anchor = peaks[i];
        candidates.clear();
        for (std::size_t j = i + 1; j < peaks.size(); ++j) {
            const Peak& target = peaks[j];
            const int dframe = target.frame - anchor.frame;
            if (dframe > params.dt_max) break;  // peaks sorted by frame
            if (dframe < 1) continue;
            if (std::abs(target.bin - anchor.bin) > params.df_max) continue;
            candidates.push_back(&target);
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](const Peak* a, const Peak* b) {
                             const int dta = a->frame - anchor.frame;
                             const int dtb = b->frame - anchor.frame;
                             if (dta != dtb) return dta < dtb;
                             const int dfa = std::abs(a->bin - anchor.bin);
                             const int dfb = std::abs(b->bin - anchor.bin);
                             if (dfa != dfb) return dfa < dfb;
                             return a->bin < b->bin;
                         });
        const std::size_t take =
            std::min(candidates.size(), static_cast<std::size_t>(params.fan_out));
        for (std::size_t k = 0; k < take; ++k) {
            const Peak& target = *candidates[k];
            out.push_back({anchor.bin, target.bin, anchor.frame,
                           target.frame - anchor.frame});
        }
    }
    return out;
}

HashKey hash_landmark(const Landmark& lm, int df_max) {
    if (df_max < 0 || df_max > 31)
        throw RangeError("hash_landmark: df_max must be in [0, 31]");
    if (lm.f1 < 0 || lm.f1 >= 512)
        throw RangeError("hash_landmark: f1 out of range [0, 512): " +
                         std::to_string(lm.f1));
    if (lm.dt < 1 || lm.dt > 63)
        throw RangeError("hash_landmark: dt out of range [1, 63]: " +
                         std::to_string(lm.dt));
    if (lm.f2 - lm.f1 < -df_max || lm.f2 - lm.f1 > df_max)
        throw RangeError("hash_landmark: |f2 - f1| exceeds df_max: " +
                         std::to_string(lm.f2 - lm.f1));
    const int shifted_df = lm.f2 - lm.f1 + df_max;
    return (static_cast<HashKey>(lm.f1) << 12) |
           (static_cast<HashKey>(shifted_df) << 6) | static_cast<HashKey>(lm.dt);
}

}  // namespace cliporg
