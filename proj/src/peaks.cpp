#include "cliporg/peaks.hpp"

#include <algorithm>

#include "cliporg/errors.hpp"

namespace cliporg {

namespace {

bool is_strict_maximum(const Spectrogram& spec, int frame, int bin, int nt, int nf) {
    const float value = spec.at(static_cast<std::size_t>(frame),
                                static_cast<std::size_t>(bin));
    const int f_lo = std::max(0, frame - nt);
    const int f_hi = std::min(static_cast<int>(spec.frames) - 1, frame + nt);
    const int b_lo = std::max(0, bin - nf);
    const int b_hi = std::min(static_cast<int>(spec.bins) - 1, bin + nf);
    for (int f = f_lo; f <= f_hi; ++f) {
        for (int b = b_lo; b <= b_hi; ++b) {
            if (f == frame && b == bin) continue;
            if (spec.at(static_cast<std::size_t>(f), static_cast<std::size_t>(b)) >= value)
                return false;
        }
    }
    return true;
}

}  // namespace

std::vector<Peak> extract_peaks(const Spectrogram& spec, const PeakParams& params) {
    if (params.neighborhood_frames < 1 || params.neighborhood_bins < 1)
        throw RangeError("peaks: neighborhood extents must be >= 1");
    if (params.max_per_frame < 1)
        throw RangeError("peaks: max_per_frame must be >= 1");

    std::vector<Peak> out;
    if (spec.frames == 0 || spec.bins == 0) return out;

    const auto nf = static_cast<std::size_t>(params.neighborhood_bins);
    if (spec.bins < 2 * nf + 1) return out;

    std::vector<Peak> frame_peaks;
    for (std::size_t f = 0; f < spec.frames; ++f) {
        frame_peaks.clear();
        for (std::size_t b = nf; b + nf < spec.bins; ++b) {
            const float value = spec.at(f, b);
            if (value <= params.min_magnitude) continue;
            if (!is_strict_maximum(spec, static_cast<int>(f), static_cast<int>(b),
                                   params.neighborhood_frames, params.neighborhood_bins))
                continue;
            frame_peaks.push_back({static_cast<int>(f), static_cast<int>(b), value});
        }
        if (frame_peaks.size() > static_cast<std::size_t>(params.max_per_frame)) {
            std::stable_sort(frame_peaks.begin(), frame_peaks.end(),
                             [](const Peak& a, const Peak& b) {
                                 if (a.magnitude != b.magnitude)
                                     return a.magnitude > b.magnitude;
                                 return a.bin < b.bin;
                             });
            frame_peaks.resize(static_cast<std::size_t>(params.max_per_frame));
            std::sort(frame_peaks.begin(), frame_peaks.end(),
                      [](const Peak& a, const Peak& b) { return a.bin < b.bin; });
        }
        out.insert(out.end(), frame_peaks.begin(), frame_peaks.end());
    }
    return out;
}

}  // namespace cliporg
