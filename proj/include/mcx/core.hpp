#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcx {

// ============================================================================
// errors
// ============================================================================

enum class error_kind {
    usage, // bad arguments or configuration; CLI exit status 2
    data,  // malformed or incompatible input; CLI exit status 1
    tool,  // external tool failure; CLI exit status 1
};

class error : public std::runtime_error {
  public:
    error(error_kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    error_kind kind() const noexcept { return kind_; }

  private:
    error_kind kind_;
};

[[noreturn]] inline void fail_usage(const std::string& message) {
    throw error(error_kind::usage, message);
}

[[noreturn]] inline void fail_data(const std::string& message) {
    throw error(error_kind::data, message);
}

[[noreturn]] inline void fail_tool(const std::string& message) {
    throw error(error_kind::tool, message);
}

// ============================================================================
// symbol_string: an immutable microstate
// ============================================================================

enum class encoding : std::uint8_t {
    bits,  // bit-granular payload, MSB-first within each byte, pad bits zero
    bytes, // opaque byte sequence
    pcm16, // mono 16-bit little-endian PCM samples
};

inline const char* encoding_name(encoding e) {
    switch (e) {
    case encoding::bits: return "bits";
    case encoding::bytes: return "bytes";
    case encoding::pcm16: return "pcm16-mono";
    }
    return "?";
}

class symbol_string {
  public:
    symbol_string() : tag_(encoding::bytes), bit_length_(0) {}

    static symbol_string from_bytes(std::vector<std::uint8_t> payload) {
        symbol_string s;
        s.tag_ = encoding::bytes;
        s.bit_length_ = 8 * static_cast<std::uint64_t>(payload.size());
        s.payload_ = std::move(payload);
        return s;
    }

    static symbol_string from_bytes(std::string_view text) {
        return from_bytes(std::vector<std::uint8_t>(text.begin(), text.end()));
    }

    // Packed bit string; payload must already be MSB-first with zero pad bits.
    static symbol_string from_packed_bits(std::vector<std::uint8_t> payload,
                                          std::uint64_t bit_length) {
        if (payload.size() != (bit_length + 7) / 8)
            fail_data("bit payload has wrong byte count for bit_length");
        if (bit_length % 8 != 0 && !payload.empty()) {
            std::uint8_t pad_mask =
                static_cast<std::uint8_t>(0xFFu >> (bit_length % 8));
            if (payload.back() & pad_mask)
                fail_data("nonzero pad bits in bit string");
        }
        symbol_string s;
        s.tag_ = encoding::bits;
        s.bit_length_ = bit_length;
        s.payload_ = std::move(payload);
        return s;
    }

    // Text of '0'/'1' characters, first character = first bit.
    static symbol_string from_bit_text(std::string_view text) {
        std::vector<std::uint8_t> payload((text.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (c != '0' && c != '1')
                fail_data("bit text may contain only '0' and '1'");
            if (c == '1')
                payload[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
        }
        return from_packed_bits(std::move(payload), text.size());
    }

    // Low `length` bits of `value`, most significant first.
    static symbol_string from_bit_value(std::uint64_t value, std::uint32_t length) {
        if (length > 64)
            fail_usage("bit value length exceeds 64");
        std::vector<std::uint8_t> payload((length + 7) / 8, 0);
        for (std::uint32_t i = 0; i < length; ++i) {
            if ((value >> (length - 1 - i)) & 1u)
                payload[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
        }
        return from_packed_bits(std::move(payload), length);
    }

    static symbol_string from_samples(const std::vector<std::int16_t>& samples) {
        std::vector<std::uint8_t> payload(samples.size() * 2);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            std::uint16_t u = static_cast<std::uint16_t>(samples[i]);
            payload[2 * i] = static_cast<std::uint8_t>(u & 0xFF);
            payload[2 * i + 1] = static_cast<std::uint8_t>(u >> 8);
        }
        symbol_string s;
        s.tag_ = encoding::pcm16;
        s.bit_length_ = 8 * static_cast<std::uint64_t>(payload.size());
        s.payload_ = std::move(payload);
        return s;
    }

    static symbol_string pcm16_from_bytes(std::vector<std::uint8_t> payload) {
        if (payload.size() % 2 != 0)
            fail_data("pcm16 payload must have an even byte count");
        symbol_string s;
        s.tag_ = encoding::pcm16;
        s.bit_length_ = 8 * static_cast<std::uint64_t>(payload.size());
        s.payload_ = std::move(payload);
        return s;
    }

    encoding tag() const noexcept { return tag_; }
    const std::vector<std::uint8_t>& payload() const noexcept { return payload_; }
    std::uint64_t bit_length() const noexcept { return bit_length_; }
    std::size_t byte_size() const noexcept { return payload_.size(); }
    bool empty() const noexcept { return bit_length_ == 0; }

    bool bit(std::uint64_t i) const {
        if (i >= bit_length_)
            fail_data("bit index out of range");
        return (payload_[i / 8] >> (7 - i % 8)) & 1u;
    }

    std::size_t sample_count() const {
        if (tag_ != encoding::pcm16)
            fail_data("sample access requires pcm16-mono encoding");
        return payload_.size() / 2;
    }

    std::int16_t sample(std::size_t i) const {
        if (tag_ != encoding::pcm16)
            fail_data("sample access requires pcm16-mono encoding");
        std::uint16_t u = static_cast<std::uint16_t>(payload_[2 * i]) |
                          static_cast<std::uint16_t>(payload_[2 * i + 1]) << 8;
        return static_cast<std::int16_t>(u);
    }

    std::vector<std::int16_t> samples() const {
        std::size_t n = sample_count();
        std::vector<std::int16_t> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = sample(i);
        return out;
    }

    std::string to_bit_text() const {
        std::string out;
        out.reserve(bit_length_);
        for (std::uint64_t i = 0; i < bit_length_; ++i)
            out.push_back(bit(i) ? '1' : '0');
        return out;
    }

    friend bool operator==(const symbol_string& a, const symbol_string& b) {
        return a.tag_ == b.tag_ && a.bit_length_ == b.bit_length_ &&
               a.payload_ == b.payload_;
    }

  private:
    encoding tag_;
    std::uint64_t bit_length_;
    std::vector<std::uint8_t> payload_;
};

// ============================================================================
// string combination for conditional complexity
// ============================================================================

// Fixed separator keeping the two operands adjacent but unambiguous for
// dictionary compressors; 0x00 0xFF is not a plausible phrase boundary in
// either text or PCM payloads.
inline constexpr std::uint8_t join_sentinel[2] = {0x00, 0xFF};

inline symbol_string join_for_conditional(const symbol_string& a,
                                          const symbol_string& b) {
    if (a.tag() != b.tag())
        fail_data("incompatible encodings");
    std::vector<std::uint8_t> payload;
    payload.reserve(a.byte_size() + b.byte_size() + 2);
    payload.insert(payload.end(), a.payload().begin(), a.payload().end());
    payload.push_back(join_sentinel[0]);
    payload.push_back(join_sentinel[1]);
    payload.insert(payload.end(), b.payload().begin(), b.payload().end());
    return symbol_string::from_bytes(std::move(payload));
}

// ============================================================================
// compressor contract and estimate report
// ============================================================================

struct compressor {
    std::string name;
    // Deterministic total map from payload bytes to a code length in bits;
    // must return 0 for empty input.
    std::function<std::uint64_t(const std::vector<std::uint8_t>&)> code_length;
};

struct complexity_report {
    double k_hat_bits = 0.0;
    double s_hat_bits = 0.0;
    double entropy_estimate_bits = 0.0; // k_hat_bits - s_hat_bits, as stored
    double cardinality_estimate = 1.0;  // 2^entropy_estimate_bits
    std::string relation_name;
    std::string compressor_name;
};

} // namespace mcx
