#include <doctest.h>

#include <cstring>

#include "cliporg/errors.hpp"
#include "cliporg/rng.hpp"
#include "cliporg/wav.hpp"

using namespace cliporg;

namespace {

std::vector<std::uint8_t> pcm16_wav_bytes(int rate, int channels,
                                          const std::vector<std::int16_t>& samples) {
    AudioClip clip;
    clip.sample_rate = rate;
    clip.channels = channels;
    clip.samples.reserve(samples.size());
    for (std::int16_t v : samples) clip.samples.push_back(static_cast<float>(v) / 32768.0f);
    return encode_wav_pcm16(clip);
}

}  // namespace

TEST_CASE("decode: one second of 16-bit silence") {
    const std::vector<std::int16_t> samples(44100, 0);
    const AudioClip clip = decode_wav(pcm16_wav_bytes(44100, 1, samples));
    CHECK(clip.sample_rate == 44100);
    CHECK(clip.channels == 1);
    CHECK(clip.frames() == 44100);
    CHECK(clip.duration_s() == doctest::Approx(1.0));
    for (float s : clip.samples) CHECK(s == 0.0f);
}

TEST_CASE("decode: PCM16 scaling is v / 32768") {
    const AudioClip clip = decode_wav(pcm16_wav_bytes(8000, 1, {32767, -32768, 16384}));
    CHECK(clip.samples[0] == 32767.0f / 32768.0f);
    CHECK(clip.samples[1] == -1.0f);
    CHECK(clip.samples[2] == 0.5f);
}

TEST_CASE("decode/encode: 16-bit PCM round-trips bit-exactly") {
    Rng rng(7);
    std::vector<std::int16_t> samples(5000);
    for (auto& s : samples) s = static_cast<std::int16_t>(rng.uniform_int(-32768, 32767));
    const AudioClip first = decode_wav(pcm16_wav_bytes(11025, 2, samples));
    const AudioClip second = decode_wav(encode_wav_pcm16(first));
    CHECK(second.sample_rate == first.sample_rate);
    CHECK(second.channels == first.channels);
    REQUIRE(second.samples.size() == first.samples.size());
    CHECK(std::memcmp(second.samples.data(), first.samples.data(),
                      first.samples.size() * sizeof(float)) == 0);
}

TEST_CASE("decode: float32 samples pass through (clamped)") {
    AudioClip clip;
    clip.sample_rate = 22050;
    clip.channels = 1;
    clip.samples = {0.25f, -0.75f, 1.0f, -1.0f};
    const AudioClip decoded = decode_wav(encode_wav_float32(clip));
    CHECK(decoded.samples == clip.samples);
}

TEST_CASE("decode: stereo stays interleaved") {
    const AudioClip clip = decode_wav(pcm16_wav_bytes(8000, 2, {100, -100, 200, -200}));
    CHECK(clip.channels == 2);
    CHECK(clip.frames() == 2);
    CHECK(clip.samples[0] == doctest::Approx(100.0f / 32768.0f));
    CHECK(clip.samples[1] == doctest::Approx(-100.0f / 32768.0f));
}

TEST_CASE("decode: malformed input names the offending part") {
    SUBCASE("not RIFF") {
        std::vector<std::uint8_t> bytes = {'J', 'U', 'N', 'K', 0, 0, 0, 0};
        CHECK_THROWS_AS(decode_wav(bytes), DecodeError);
    }
    SUBCASE("missing fmt chunk") {
        std::vector<std::uint8_t> bytes = {'R', 'I', 'F', 'F', 4, 0, 0, 0,
                                           'W', 'A', 'V', 'E'};
        CHECK_THROWS_WITH_AS(decode_wav(bytes), doctest::Contains("fmt"), DecodeError);
    }
    SUBCASE("truncated data chunk") {
        auto bytes = pcm16_wav_bytes(8000, 1, {1, 2, 3, 4});
        bytes.resize(bytes.size() - 3);
        CHECK_THROWS_AS(decode_wav(bytes), DecodeError);
    }
}

TEST_CASE("decode: unsupported encodings are refused") {
    SUBCASE("compressed format tag") {
        auto bytes = pcm16_wav_bytes(8000, 1, {0, 0});
        bytes[20] = 2;  // format code in fmt chunk
        CHECK_THROWS_AS(decode_wav(bytes), UnsupportedFormatError);
    }
    SUBCASE("24-bit depth") {
        auto bytes = pcm16_wav_bytes(8000, 1, {0, 0});
        bytes[34] = 24;  // bits per sample
        CHECK_THROWS_AS(decode_wav(bytes), UnsupportedFormatError);
    }
    SUBCASE("three channels") {
        auto bytes = pcm16_wav_bytes(8000, 1, {0, 0, 0});
        bytes[22] = 3;  // channel count
        CHECK_THROWS_AS(decode_wav(bytes), UnsupportedFormatError);
    }
}

TEST_CASE("decode: unknown chunks are skipped") {
    auto bytes = pcm16_wav_bytes(8000, 1, {42});
    // splice a LIST chunk between fmt and data
    std::vector<std::uint8_t> extra = {'L', 'I', 'S', 'T', 4, 0, 0, 0, 'i', 'n', 'f', 'o'};
    bytes.insert(bytes.begin() + 36, extra.begin(), extra.end());
    bytes[4] = static_cast<std::uint8_t>(bytes[4] + 12);  // RIFF size
    const AudioClip clip = decode_wav(bytes);
    CHECK(clip.frames() == 1);
    CHECK(clip.samples[0] == 42.0f / 32768.0f);
}
