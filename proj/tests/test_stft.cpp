#include <doctest.h>

#include <cmath>

#include "cliporg/errors.hpp"
#include "cliporg/fft.hpp"
#include "cliporg/rng.hpp"
#include "cliporg/stft.hpp"

#include "test_support.hpp"

using namespace cliporg;

TEST_CASE("fft matches the naive DFT") {
    Rng rng(23);
    for (std::size_t n : {2u, 8u, 64u, 512u}) {
        std::vector<std::complex<double>> data(n);
        for (auto& v : data) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto expected = testsupport::naive_dft(data);
        auto actual = data;
        fft_radix2(actual);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(actual[i].real() == doctest::Approx(expected[i].real()).epsilon(1e-9));
            CHECK(actual[i].imag() == doctest::Approx(expected[i].imag()).epsilon(1e-9));
        }
    }
}

TEST_CASE("fft rejects non-power-of-two sizes") {
    std::vector<std::complex<double>> data(6);
    CHECK_THROWS_AS(fft_radix2(data), RangeError);
}

TEST_CASE("spectrogram: pure 1 kHz sine peaks in the expected bin everywhere") {
    const AudioClip clip = testsupport::make_sine(1000.0, 2.0, 11025);
    const Spectrogram spec = compute_spectrogram(clip, StftParams{});
    const auto expected_bin =
        static_cast<std::size_t>(std::lround(1000.0 / spec.bin_width_hz));
    CHECK(expected_bin == 46);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        std::size_t argmax = 0;
        for (std::size_t b = 1; b < spec.bins; ++b)
            if (spec.at(f, b) > spec.at(f, argmax)) argmax = b;
        CHECK(argmax == expected_bin);
    }
}

TEST_CASE("spectrogram: silence maps to exactly zero") {
    AudioClip clip;
    clip.sample_rate = 11025;
    clip.channels = 1;
    clip.samples.assign(11025, 0.0f);
    const Spectrogram spec = compute_spectrogram(clip, StftParams{});
    for (float m : spec.magnitudes) CHECK(m == 0.0f);
}

TEST_CASE("spectrogram: framing arithmetic") {
    StftParams params;  // 512 / 256
    AudioClip clip;
    clip.sample_rate = 11025;
    clip.channels = 1;

    SUBCASE("exactly one window yields one frame") {
        clip.samples.assign(512, 0.1f);
        const Spectrogram spec = compute_spectrogram(clip, params);
        CHECK(spec.frames == 1);
        CHECK(spec.bins == 257);
    }
    SUBCASE("one sample short of a second frame") {
        clip.samples.assign(512 + 255, 0.1f);
        CHECK(compute_spectrogram(clip, params).frames == 1);
    }
    SUBCASE("a full hop adds a frame") {
        clip.samples.assign(512 + 256, 0.1f);
        CHECK(compute_spectrogram(clip, params).frames == 2);
    }
    SUBCASE("shorter than a window is an error") {
        clip.samples.assign(511, 0.1f);
        CHECK_THROWS_AS(compute_spectrogram(clip, params), InputError);
    }
}

TEST_CASE("spectrogram: grid metadata") {
    const AudioClip clip = testsupport::make_sine(500.0, 1.0, 11025);
    const Spectrogram spec = compute_spectrogram(clip, StftParams{});
    CHECK(spec.frame_duration_s == doctest::Approx(256.0 / 11025.0));
    CHECK(spec.bin_width_hz == doctest::Approx(11025.0 / 512.0));
    for (float m : spec.magnitudes) {
        CHECK(std::isfinite(m));
        CHECK(m >= 0.0f);
    }
}
