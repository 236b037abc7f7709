#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cliporg/audio_clip.hpp"
#include "cliporg/landmark.hpp"
#include "cliporg/peaks.hpp"
#include "cliporg/stft.hpp"

namespace cliporg {

/// A clip's full landmark set. total_landmarks() is the denominator used by
/// the matching-percentage computation downstream.
struct Fingerprint {
    std::string sample_id;
    std::vector<Landmark> landmarks;

    std::size_t total_landmarks() const { return landmarks.size(); }
};

struct FingerprintParams {
    int analysis_rate = 11025;
    StftParams stft;
    PeakParams peaks;
    PairingParams pairing;
};

/// STFT -> peak extraction -> pairing. The clip must already be canonical
/// (mono, analysis rate); stage errors propagate.
Fingerprint fingerprint_clip(const AudioClip& clip, std::string sample_id,
                             const FingerprintParams& params);

// Binary fingerprint record: magic "CLFP", u16 version, u16 id length,
// UTF-8 id, u32 landmark count, then per landmark u16 f1, u16 f2, u32 t1,
// u16 dt. Little-endian throughout.
inline constexpr std::uint16_t kFingerprintFormatVersion = 1;

void write_fingerprint(std::ostream& out, const Fingerprint& fp);
Fingerprint read_fingerprint(std::istream& in);

/// JSON debug dump (same fields as the binary record).
std::string fingerprint_to_json(const Fingerprint& fp);

}  // namespace cliporg
