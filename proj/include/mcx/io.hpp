#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace mcx {

// ============================================================================
// file bytes and digests
// ============================================================================

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail_data("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad())
        fail_data("failed reading file: " + path);
    return bytes;
}

inline void write_file_bytes(const std::string& path,
                             const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail_data("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        fail_data("failed writing file: " + path);
}

inline std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string digest_hex(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return s;
}

// ============================================================================
// minimal RIFF/WAVE PCM16 mono
// ============================================================================

struct wav_data {
    std::uint32_t sample_rate = 0;
    std::vector<std::uint8_t> pcm_bytes; // little-endian int16 pairs, verbatim
};

namespace detail {

inline std::uint32_t read_u32le(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) |
           static_cast<std::uint32_t>(b[at + 1]) << 8 |
           static_cast<std::uint32_t>(b[at + 2]) << 16 |
           static_cast<std::uint32_t>(b[at + 3]) << 24;
}

inline std::uint16_t read_u16le(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<std::uint16_t>(b[at]) |
                                      static_cast<std::uint16_t>(b[at + 1]) << 8);
}

inline void push_u32le(std::vector<std::uint8_t>& b, std::uint32_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xFF));
    b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    b.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    b.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

inline void push_u16le(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xFF));
    b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

} // namespace detail

inline wav_data parse_wav(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12 || bytes[0] != 'R' || bytes[1] != 'I' ||
        bytes[2] != 'F' || bytes[3] != 'F' || bytes[8] != 'W' ||
        bytes[9] != 'A' || bytes[10] != 'V' || bytes[11] != 'E')
        fail_data("malformed wav header: missing RIFF/WAVE magic");

    wav_data wav;
    bool have_fmt = false, have_data = false;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        std::string id(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                       bytes.begin() + static_cast<std::ptrdiff_t>(pos) + 4);
        std::uint32_t size = detail::read_u32le(bytes, pos + 4);
        pos += 8;
        if (pos + size > bytes.size())
            fail_data("malformed wav header: chunk '" + id + "' overruns file");
        if (id == "fmt ") {
            if (size < 16)
                fail_data("malformed wav header: fmt chunk too small");
            std::uint16_t format = detail::read_u16le(bytes, pos);
            std::uint16_t channels = detail::read_u16le(bytes, pos + 2);
            std::uint32_t rate = detail::read_u32le(bytes, pos + 4);
            std::uint16_t bits_per_sample = detail::read_u16le(bytes, pos + 14);
            if (format != 1)
                fail_data("wav format=" + std::to_string(format) +
                          " unsupported (PCM only)");
            if (channels != 1)
                fail_data("wav channels=" + std::to_string(channels) +
                          " unsupported");
            if (bits_per_sample != 16)
                fail_data("wav bits_per_sample=" + std::to_string(bits_per_sample) +
                          " unsupported");
            wav.sample_rate = rate;
            have_fmt = true;
        } else if (id == "data") {
            if (size % 2 != 0)
                fail_data("wav data chunk has odd byte count");
            wav.pcm_bytes.assign(
                bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                bytes.begin() + static_cast<std::ptrdiff_t>(pos + size));
            have_data = true;
        }
        pos += size + (size % 2); // RIFF chunks are word aligned
    }
    if (!have_fmt)
        fail_data("malformed wav header: missing fmt chunk");
    if (!have_data)
        fail_data("malformed wav header: missing data chunk");
    return wav;
}

inline std::vector<std::uint8_t> render_wav(const std::vector<std::int16_t>& samples,
                                            std::uint32_t sample_rate) {
    std::vector<std::uint8_t> out;
    const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 2);
    out.reserve(44 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    detail::push_u32le(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    detail::push_u32le(out, 16);
    detail::push_u16le(out, 1); // PCM
    detail::push_u16le(out, 1); // mono
    detail::push_u32le(out, sample_rate);
    detail::push_u32le(out, sample_rate * 2);
    detail::push_u16le(out, 2);
    detail::push_u16le(out, 16);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    detail::push_u32le(out, data_size);
    for (std::int16_t s : samples) {
        std::uint16_t u = static_cast<std::uint16_t>(s);
        out.push_back(static_cast<std::uint8_t>(u & 0xFF));
        out.push_back(static_cast<std::uint8_t>(u >> 8));
    }
    return out;
}

// ============================================================================
// input loading
// ============================================================================

enum class input_format { raw, bits, wav };

inline const char* input_format_name(input_format f) {
    switch (f) {
    case input_format::raw: return "raw";
    case input_format::bits: return "bits";
    case input_format::wav: return "wav";
    }
    return "?";
}

inline input_format parse_input_format(std::string_view text) {
    if (text == "raw")
        return input_format::raw;
    if (text == "bits")
        return input_format::bits;
    if (text == "wav")
        return input_format::wav;
    fail_usage("unknown input format '" + std::string(text) + "'");
}

inline input_format infer_input_format(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".wav")
        return input_format::wav;
    if (ext == ".bits")
        return input_format::bits;
    return input_format::raw;
}

struct input_source {
    std::string path;
    input_format format = input_format::raw;
    symbol_string data;
    std::uint32_t sample_rate = 0; // wav only
    std::string digest;            // of the raw file bytes
};

inline input_source load_input(const std::string& path, input_format format) {
    std::vector<std::uint8_t> bytes = read_file_bytes(path);
    input_source src;
    src.path = path;
    src.format = format;
    src.digest = digest_hex(bytes);
    switch (format) {
    case input_format::raw:
        src.data = symbol_string::from_bytes(std::move(bytes));
        break;
    case input_format::bits: {
        std::string text;
        for (std::uint8_t b : bytes) {
            char c = static_cast<char>(b);
            if (c == '0' || c == '1')
                text.push_back(c);
            else if (c != ' ' && c != '\n' && c != '\r' && c != '\t')
                fail_data("bits file contains a character other than 0/1/whitespace: " +
                          path);
        }
        src.data = symbol_string::from_bit_text(text);
        break;
    }
    case input_format::wav: {
        wav_data wav = parse_wav(bytes);
        src.data = symbol_string::pcm16_from_bytes(std::move(wav.pcm_bytes));
        src.sample_rate = wav.sample_rate;
        break;
    }
    }
    return src;
}

} // namespace mcx
