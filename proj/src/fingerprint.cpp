#include "cliporg/fingerprint.hpp"

#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "cliporg/errors.hpp"

namespace cliporg {

namespace {

void put_u16(std::ostream& out, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(bytes, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint16_t get_u16(std::istream& in, const char* what) {
    unsigned char bytes[2];
    in.read(reinterpret_cast<char*>(bytes), 2);
    if (!in) throw DecodeError(std::string("fingerprint: truncated ") + what);
    return static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
}

std::uint32_t get_u32(std::istream& in, const char* what) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw DecodeError(std::string("fingerprint: truncated ") + what);
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

Fingerprint fingerprint_clip(const AudioClip& clip, std::string sample_id,
                             const FingerprintParams& params) {
    if (clip.channels != 1 || clip.sample_rate != params.analysis_rate)
        throw InputError("fingerprint: clip is not canonical (mono @ " +
                         std::to_string(params.analysis_rate) + " Hz)");
    const Spectrogram spec = compute_spectrogram(clip, params.stft);
    const std::vector<Peak> peaks = extract_peaks(spec, params.peaks);
    Fingerprint fp;
    fp.sample_id = std::move(sample_id);
    fp.landmarks = pair_landmarks(peaks, params.pairing);
    return fp;
}

void write_fingerprint(std::ostream& out, const Fingerprint& fp) {
    if (fp.sample_id.size() > std::numeric_limits<std::uint16_t>::max())
        throw RangeError("fingerprint: sample id longer than 65535 bytes");
    if (fp.landmarks.size() > std::numeric_limits<std::uint32_t>::max())
        throw RangeError("fingerprint: landmark count exceeds u32");
    out.write("CLFP", 4);
    put_u16(out, kFingerprintFormatVersion);
    put_u16(out, static_cast<std::uint16_t>(fp.sample_id.size()));
    out.write(fp.sample_id.data(), static_cast<std::streamsize>(fp.sample_id.size()));
    put_u32(out, static_cast<std::uint32_t>(fp.landmarks.size()));
    for (const Landmark& lm : fp.landmarks) {
        put_u16(out, static_cast<std::uint16_t>(lm.f1));
        put_u16(out, static_cast<std::uint16_t>(lm.f2));
        put_u32(out, static_cast<std::uint32_t>(lm.t1));
        put_u16(out, static_cast<std::uint16_t>(lm.dt));
    }
}

Fingerprint read_fingerprint(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "CLFP")
        throw DecodeError("fingerprint: bad magic (expected CLFP)");
    const std::uint16_t version = get_u16(in, "version");
    if (version != kFingerprintFormatVersion)
        throw DecodeError("fingerprint: unsupported format version " +
                          std::to_string(version));
    const std::uint16_t id_len = get_u16(in, "id length");
    std::string id(id_len, '\0');
    in.read(id.data(), id_len);
    if (!in) throw DecodeError("fingerprint: truncated sample id");
    const std::uint32_t count = get_u32(in, "landmark count");
    Fingerprint fp;
    fp.sample_id = std::move(id);
    fp.landmarks.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Landmark lm;
        lm.f1 = get_u16(in, "landmark f1");
        lm.f2 = get_u16(in, "landmark f2");
        lm.t1 = static_cast<int>(get_u32(in, "landmark t1"));
        lm.dt = get_u16(in, "landmark dt");
        fp.landmarks.push_back(lm);
    }
    return fp;
}

std::string fingerprint_to_json(const Fingerprint& fp) {
    nlohmann::json j;
    j["sample_id"] = fp.sample_id;
    j["total_landmarks"] = fp.total_landmarks();
    auto& arr = j["landmarks"] = nlohmann::json::array();
    for (const Landmark& lm : fp.landmarks)
        arr.push_back({{"f1", lm.f1}, {"f2", lm.f2}, {"t1", lm.t1}, {"dt", lm.dt}});
    return j.dump(2);
}

}  // namespace cliporg
