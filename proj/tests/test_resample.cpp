#include <doctest.h>

#include <cmath>
#include <cstring>

#include "cliporg/errors.hpp"
#include "cliporg/resample.hpp"
#include "cliporg/rng.hpp"

#include "test_support.hpp"

using namespace cliporg;

TEST_CASE("canonicalise: identical stereo channels mix to either channel") {
    AudioClip stereo;
    stereo.sample_rate = 11025;
    stereo.channels = 2;
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const float v = static_cast<float>(rng.uniform(-0.9, 0.9));
        stereo.samples.push_back(v);
        stereo.samples.push_back(v);
    }
    const AudioClip mono = canonicalise(stereo, 11025);
    REQUIRE(mono.frames() == stereo.frames());
    for (std::size_t i = 0; i < mono.frames(); ++i)
        CHECK(mono.samples[i] == doctest::Approx(stereo.samples[2 * i]).epsilon(1e-7));
}

TEST_CASE("canonicalise: mono at target rate is the identity") {
    AudioClip clip = testsupport::make_sine(440.0, 0.5, 11025);
    const AudioClip out = canonicalise(clip, 11025);
    CHECK(out.sample_rate == clip.sample_rate);
    CHECK(out.samples == clip.samples);
}

TEST_CASE("canonicalise: 100 Hz sine keeps its frequency through resampling") {
    const AudioClip in = testsupport::make_sine(100.0, 1.0, 44100);
    const AudioClip out = canonicalise(in, 11025);
    CHECK(out.sample_rate == 11025);
    // DFT oracle: dominant bin of the resampled signal
    const std::size_t n = 4096;
    const std::size_t bin = testsupport::dominant_bin(out.samples, n);
    const double bin_width = 11025.0 / static_cast<double>(n);
    const auto expected = static_cast<std::size_t>(std::lround(100.0 / bin_width));
    CHECK(bin >= expected - 1);
    CHECK(bin <= expected + 1);
}

TEST_CASE("canonicalise: idempotent sample for sample") {
    Rng rng(11);
    AudioClip clip;
    clip.sample_rate = 44100;
    clip.channels = 2;
    for (int i = 0; i < 44100; ++i) {
        clip.samples.push_back(static_cast<float>(rng.uniform(-1.0, 1.0)));
        clip.samples.push_back(static_cast<float>(rng.uniform(-1.0, 1.0)));
    }
    const AudioClip once = canonicalise(clip, 11025);
    const AudioClip twice = canonicalise(once, 11025);
    REQUIRE(once.samples.size() == twice.samples.size());
    CHECK(std::memcmp(once.samples.data(), twice.samples.data(),
                      once.samples.size() * sizeof(float)) == 0);
}

TEST_CASE("canonicalise: duration preserved within one output sample") {
    Rng rng(17);
    for (int round = 0; round < 30; ++round) {
        const int from = static_cast<int>(rng.uniform_int(4000, 48000));
        const int to = static_cast<int>(rng.uniform_int(4000, 48000));
        const auto frames = static_cast<std::size_t>(rng.uniform_int(100, 20000));
        AudioClip clip;
        clip.sample_rate = from;
        clip.channels = 1;
        clip.samples.assign(frames, 0.1f);
        const AudioClip out = canonicalise(clip, to);
        CHECK(std::abs(out.duration_s() - clip.duration_s()) <= 1.0 / to);
    }
}

TEST_CASE("canonicalise: empty clip is an input error") {
    AudioClip clip;
    clip.sample_rate = 11025;
    clip.channels = 1;
    CHECK_THROWS_AS(canonicalise(clip, 11025), InputError);
}
