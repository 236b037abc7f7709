#pragma once

#include "cliporg/audio_clip.hpp"

namespace cliporg {

/// Mixes to mono (arithmetic mean of channels) and linearly resamples to
/// target_rate, clamping amplitudes to [-1, 1]. A clip that is already mono
/// at target_rate is returned unchanged, sample for sample, which makes the
/// operation idempotent. Throws InputError on an empty clip.
AudioClip canonicalise(const AudioClip& clip, int target_rate);

}  // namespace cliporg
