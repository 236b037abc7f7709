#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cliporg/audio_clip.hpp"

namespace cliporg {

/// Parses a RIFF/WAVE container holding PCM 16-bit or IEEE-float 32-bit
/// samples, 1 or 2 channels. Integer sample v maps to v / 32768.0.
/// Throws DecodeError (naming the offending chunk) on malformed input and
/// UnsupportedFormatError on encodings outside the two supported ones.
AudioClip decode_wav(std::span<const std::uint8_t> bytes);

/// Encodes as 16-bit PCM; amplitude a maps to round(a * 32768), clamped.
/// decode_wav(encode_wav_pcm16(decode_wav(x))) reproduces the samples of
/// decode_wav(x) bit for bit.
std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip);

/// Encodes as IEEE-float 32-bit (used by tests; the corpus emits PCM16).
std::vector<std::uint8_t> encode_wav_float32(const AudioClip& clip);

AudioClip load_wav(const std::filesystem::path& path);
void save_wav_pcm16(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace cliporg
