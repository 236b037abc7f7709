#include "cliporg/stft.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "cliporg/errors.hpp"
#include "cliporg/fft.hpp"

namespace cliporg {

namespace {

void validate(const StftParams& p) {
    if (p.window_size < 2 || (p.window_size & (p.window_size - 1)) != 0)
        throw RangeError("stft: window_size must be a power of two >= 2");
    if (p.hop_size < 1 || p.hop_size > p.window_size)
        throw RangeError("stft: hop_size must be in (0, window_size]");
}

std::vector<double> hann_window(int size) {
    std::vector<double> w(static_cast<std::size_t>(size));
    for (int n = 0; n < size; ++n)
        w[static_cast<std::size_t>(n)] =
            0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / size);
    return w;
}

}  // namespace

Spectrogram compute_spectrogram(const AudioClip& clip, const StftParams& params) {
    validate(params);
    if (clip.channels != 1)
        throw InputError("stft: clip must be mono (canonicalise first)");
    const auto window = static_cast<std::size_t>(params.window_size);
    const auto hop = static_cast<std::size_t>(params.hop_size);
    const std::size_t n = clip.frames();
    if (n < window)
        throw InputError("stft: clip shorter than one window (" +
                         std::to_string(n) + " < " + std::to_string(window) +
                         " samples)");

    Spectrogram spec;
    spec.frames = (n - window) / hop + 1;
    spec.bins = window / 2 + 1;
    spec.frame_duration_s = static_cast<double>(params.hop_size) / clip.sample_rate;
    spec.bin_width_hz = static_cast<double>(clip.sample_rate) / params.window_size;
    spec.magnitudes.assign(spec.frames * spec.bins, 0.0f);

    const std::vector<double> hann = hann_window(params.window_size);
    std::vector<std::complex<double>> buf(window);

    for (std::size_t f = 0; f < spec.frames; ++f) {
        const std::size_t start = f * hop;
        for (std::size_t i = 0; i < window; ++i)
            buf[i] = {clip.samples[start + i] * hann[i], 0.0};
        fft_radix2(buf);
        for (std::size_t b = 0; b < spec.bins; ++b)
            spec.at(f, b) = static_cast<float>(std::log1p(std::abs(buf[b])));
    }
    return spec;
}

}  // namespace cliporg
