#pragma once

#include <cstddef>
#include <vector>

namespace cliporg {

/// Decoded audio. Samples are interleaved when channels > 1 and every
/// amplitude lies in [-1.0, 1.0]. The canonical form used by the
/// fingerprinting pipeline is mono at the configured analysis rate.
struct AudioClip {
    int sample_rate = 0;
    int channels = 0;
    std::vector<float> samples;

    /// Sample count per channel.
    std::size_t frames() const {
        return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
    }

    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(frames()) / sample_rate : 0.0;
    }

    bool empty() const { return samples.empty(); }
};

}  // namespace cliporg
