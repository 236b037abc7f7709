#pragma once

#include <cstddef>
#include <vector>

#include "cliporg/audio_clip.hpp"

namespace cliporg {

struct StftParams {
    int window_size = 512;  // samples, power of two; Hann window
    int hop_size = 256;     // 0 < hop_size <= window_size
};

/// Log-magnitude STFT grid. Values are ln(1 + |X|), so silence maps to 0
/// without needing an epsilon floor.
struct Spectrogram {
    std::size_t frames = 0;
    std::size_t bins = 0;  // window_size / 2 + 1
    std::vector<float> magnitudes;  // row-major [frame][bin]
    double frame_duration_s = 0.0;  // hop_size / sample_rate
    double bin_width_hz = 0.0;      // sample_rate / window_size

    float at(std::size_t frame, std::size_t bin) const {
        return magnitudes[frame * bins + bin];
    }
    float& at(std::size_t frame, std::size_t bin) {
        return magnitudes[frame * bins + bin];
    }
};

/// Hann-windowed log-magnitude STFT. Frame f covers samples
/// [f * hop, f * hop + window). The clip must be mono and at least one
/// window long (InputError otherwise).
Spectrogram compute_spectrogram(const AudioClip& clip, const StftParams& params);

}  // namespace cliporg
