#include "cliporg/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "cliporg/errors.hpp"

namespace cliporg {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t remaining() const { return bytes_.size() - pos_; }
    std::size_t pos() const { return pos_; }

    void require(std::size_t n, const char* what) const {
        if (remaining() < n)
            throw DecodeError(std::string("wav: truncated ") + what);
    }

    std::uint32_t u32(const char* what) {
        require(4, what);
        std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) |
                          static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8 |
                          static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16 |
                          static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24;
        pos_ += 4;
        return v;
    }

    std::uint16_t u16(const char* what) {
        require(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(
            bytes_[pos_] | (static_cast<std::uint16_t>(bytes_[pos_ + 1]) << 8));
        pos_ += 2;
        return v;
    }

    std::string tag(const char* what) {
        require(4, what);
        std::string v(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
        pos_ += 4;
        return v;
    }

    std::span<const std::uint8_t> raw(std::size_t n, const char* what) {
        require(n, what);
        auto v = bytes_.subspan(pos_, n);
        pos_ += n;
        return v;
    }

    void skip(std::size_t n, const char* what) {
        require(n, what);
        pos_ += n;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
};

FmtChunk parse_fmt(std::span<const std::uint8_t> body) {
    if (body.size() < 16) throw DecodeError("wav: 'fmt ' chunk shorter than 16 bytes");
    ByteReader r(body);
    FmtChunk fmt;
    fmt.format = r.u16("fmt ");
    fmt.channels = r.u16("fmt ");
    fmt.sample_rate = r.u32("fmt ");
    r.u32("fmt ");  // byte rate
    r.u16("fmt ");  // block align
    fmt.bits_per_sample = r.u16("fmt ");
    return fmt;
}

float sample_from_pcm16(std::uint8_t lo, std::uint8_t hi) {
    auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo) |
                                       (static_cast<std::uint16_t>(hi) << 8));
    return static_cast<float>(v) / 32768.0f;
}

float sample_from_float32(const std::uint8_t* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                         static_cast<std::uint32_t>(p[1]) << 8 |
                         static_cast<std::uint32_t>(p[2]) << 16 |
                         static_cast<std::uint32_t>(p[3]) << 24;
    float f = std::bit_cast<float>(bits);
    if (!std::isfinite(f)) f = 0.0f;
    return std::clamp(f, -1.0f, 1.0f);
}

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void append_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip, std::uint16_t format,
                                     std::uint16_t bits) {
    if (clip.channels < 1 || clip.channels > 2)
        throw RangeError("wav: only 1 or 2 channels can be encoded");
    if (clip.sample_rate <= 0) throw RangeError("wav: sample rate must be positive");

    const std::uint16_t block_align =
        static_cast<std::uint16_t>(clip.channels * bits / 8);
    const std::uint32_t data_size =
        static_cast<std::uint32_t>(clip.samples.size() * bits / 8);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    append_tag(out, "RIFF");
    append_u32(out, 36 + data_size);
    append_tag(out, "WAVE");
    append_tag(out, "fmt ");
    append_u32(out, 16);
    append_u16(out, format);
    append_u16(out, static_cast<std::uint16_t>(clip.channels));
    append_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
    append_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * block_align);
    append_u16(out, block_align);
    append_u16(out, bits);
    append_tag(out, "data");
    append_u32(out, data_size);

    if (format == kFormatPcm) {
        for (float s : clip.samples) {
            long v = std::lround(static_cast<double>(s) * 32768.0);
            v = std::clamp(v, -32768l, 32767l);
            append_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
        }
    } else {
        for (float s : clip.samples) {
            append_u32(out, std::bit_cast<std::uint32_t>(s));
        }
    }
    return out;
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.tag("RIFF header") != "RIFF") throw DecodeError("wav: missing RIFF header");
    r.u32("RIFF size");
    if (r.tag("WAVE tag") != "WAVE") throw DecodeError("wav: RIFF is not a WAVE file");

    bool have_fmt = false;
    FmtChunk fmt;
    std::span<const std::uint8_t> data;
    bool have_data = false;

    while (r.remaining() >= 8) {
        const std::string id = r.tag("chunk id");
        const std::uint32_t size = r.u32("chunk size");
        if (id == "fmt ") {
            fmt = parse_fmt(r.raw(size, "'fmt ' chunk"));
            have_fmt = true;
        } else if (id == "data") {
            data = r.raw(size, "'data' chunk");
            have_data = true;
        } else {
            r.skip(size, ("'" + id + "' chunk").c_str());
        }
        if (size % 2 == 1 && r.remaining() > 0) r.skip(1, "chunk padding");
    }

    if (!have_fmt) throw DecodeError("wav: no 'fmt ' chunk");
    if (!have_data) throw DecodeError("wav: no 'data' chunk");
    if (fmt.channels < 1 || fmt.channels > 2)
        throw UnsupportedFormatError("wav: unsupported channel count " +
                                     std::to_string(fmt.channels));
    if (fmt.sample_rate == 0) throw DecodeError("wav: 'fmt ' chunk has zero sample rate");

    AudioClip clip;
    clip.sample_rate = static_cast<int>(fmt.sample_rate);
    clip.channels = fmt.channels;

    if (fmt.format == kFormatPcm && fmt.bits_per_sample == 16) {
        if (data.size() % 2 != 0) throw DecodeError("wav: 'data' chunk has odd PCM16 size");
        const std::size_t n = data.size() / 2;
        clip.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            clip.samples[i] = sample_from_pcm16(data[2 * i], data[2 * i + 1]);
    } else if (fmt.format == kFormatFloat && fmt.bits_per_sample == 32) {
        if (data.size() % 4 != 0)
            throw DecodeError("wav: 'data' chunk has odd float32 size");
        const std::size_t n = data.size() / 4;
        clip.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            clip.samples[i] = sample_from_float32(data.data() + 4 * i);
    } else {
        throw UnsupportedFormatError(
            "wav: unsupported encoding (format " + std::to_string(fmt.format) + ", " +
            std::to_string(fmt.bits_per_sample) + " bits); need PCM16 or float32");
    }

    if (clip.samples.size() % fmt.channels != 0)
        throw DecodeError("wav: 'data' chunk is not a whole number of frames");
    return clip;
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip) {
    return encode_wav(clip, kFormatPcm, 16);
}

std::vector<std::uint8_t> encode_wav_float32(const AudioClip& clip) {
    return encode_wav(clip, kFormatFloat, 32);
}

AudioClip load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_wav(bytes);
}

void save_wav_pcm16(const std::filesystem::path& path, const AudioClip& clip) {
    const auto bytes = encode_wav_pcm16(clip);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("short write to " + path.string());
}

}  // namespace cliporg
