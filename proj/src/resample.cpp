#include "cliporg/resample.hpp"

#include <algorithm>
#include <cmath>

#include "cliporg/errors.hpp"

namespace cliporg {

namespace {

std::vector<float> mixdown(const AudioClip& clip) {
    if (clip.channels == 1) return clip.samples;
    const std::size_t frames = clip.frames();
    const auto channels = static_cast<std::size_t>(clip.channels);
    std::vector<float> mono(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c)
            acc += clip.samples[f * channels + c];
        mono[f] = static_cast<float>(acc / static_cast<double>(channels));
    }
    return mono;
}

std::vector<float> linear_resample(const std::vector<float>& in, int from_rate,
                                   int to_rate) {
    const auto n = static_cast<std::int64_t>(in.size());
    const auto out_count = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(n) * to_rate / from_rate));
    std::vector<float> out(static_cast<std::size_t>(out_count));
    const double step = static_cast<double>(from_rate) / to_rate;
    for (std::int64_t m = 0; m < out_count; ++m) {
        const double x = static_cast<double>(m) * step;
        auto i = static_cast<std::int64_t>(x);
        if (i >= n - 1) {
            out[static_cast<std::size_t>(m)] = in[static_cast<std::size_t>(n - 1)];
            continue;
        }
        const double frac = x - static_cast<double>(i);
        const double v = (1.0 - frac) * in[static_cast<std::size_t>(i)] +
                         frac * in[static_cast<std::size_t>(i + 1)];
        out[static_cast<std::size_t>(m)] = static_cast<float>(v);
    }
    return out;
}

}  // namespace

AudioClip canonicalise(const AudioClip& clip, int target_rate) {
    if (clip.empty()) throw InputError("canonicalise: empty clip");
    if (clip.sample_rate <= 0) throw RangeError("canonicalise: clip sample rate must be positive");
    if (clip.channels <= 0) throw RangeError("canonicalise: clip channel count must be positive");
    if (target_rate <= 0) throw RangeError("canonicalise: target rate must be positive");

    if (clip.channels == 1 && clip.sample_rate == target_rate) return clip;

    std::vector<float> mono = mixdown(clip);
    if (clip.sample_rate != target_rate)
        mono = linear_resample(mono, clip.sample_rate, target_rate);
    for (float& s : mono) s = std::clamp(s, -1.0f, 1.0f);

    AudioClip out;
    out.sample_rate = target_rate;
    out.channels = 1;
    out.samples = std::move(mono);
    return out;
}

}  // namespace cliporg
