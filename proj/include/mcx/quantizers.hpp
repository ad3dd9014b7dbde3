#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "fft.hpp"

namespace mcx {

// ============================================================================
// relation_spec: the menu of bundled equivalence relations
// ============================================================================

enum class relation_kind {
    identity,
    multiset,
    parity,
    prefix_cylinder, // keep first n bits, zero the rest
    bitdepth,        // keep top k bits of each sample
    downsample,      // keep every m-th sample in place, zero the rest
    bandlimit,       // zero all spectral bins above the cutoff frequency
};

struct relation_spec {
    relation_kind kind = relation_kind::identity;
    std::uint32_t n = 0;              // prefix_cylinder
    std::uint32_t k = 0;              // bitdepth
    std::uint32_t m = 0;              // downsample
    std::uint32_t sample_rate_hz = 0; // bandlimit
    std::uint32_t cutoff_hz = 0;      // bandlimit

    static relation_spec identity() { return {}; }

    static relation_spec multiset() {
        relation_spec s;
        s.kind = relation_kind::multiset;
        return s;
    }

    static relation_spec parity() {
        relation_spec s;
        s.kind = relation_kind::parity;
        return s;
    }

    static relation_spec prefix_cylinder(std::uint32_t n) {
        relation_spec s;
        s.kind = relation_kind::prefix_cylinder;
        s.n = n;
        return s;
    }

    static relation_spec bitdepth(std::uint32_t k) {
        if (k < 1 || k > 16)
            fail_usage("bitdepth requires 1 <= k <= 16");
        relation_spec s;
        s.kind = relation_kind::bitdepth;
        s.k = k;
        return s;
    }

    static relation_spec downsample(std::uint32_t m) {
        if (m < 1)
            fail_usage("downsample requires m >= 1");
        relation_spec s;
        s.kind = relation_kind::downsample;
        s.m = m;
        return s;
    }

    static relation_spec bandlimit(std::uint32_t rate_hz, std::uint32_t cutoff_hz) {
        if (rate_hz == 0 || cutoff_hz == 0 || 2 * cutoff_hz >= rate_hz)
            fail_usage("bandlimit requires 0 < cutoff < sample_rate/2");
        relation_spec s;
        s.kind = relation_kind::bandlimit;
        s.sample_rate_hz = rate_hz;
        s.cutoff_hz = cutoff_hz;
        return s;
    }

    static relation_spec speech_band() { return bandlimit(48000, 3000); }

    // Textual syntax used by the CLI and stored in run manifests.
    static relation_spec parse(std::string_view text);

    std::string to_text() const {
        switch (kind) {
        case relation_kind::identity: return "identity";
        case relation_kind::multiset: return "multiset";
        case relation_kind::parity: return "parity";
        case relation_kind::prefix_cylinder:
            return "cyl:n=" + std::to_string(n);
        case relation_kind::bitdepth: return "bitdepth:k=" + std::to_string(k);
        case relation_kind::downsample: return "down:m=" + std::to_string(m);
        case relation_kind::bandlimit:
            return "band:rate=" + std::to_string(sample_rate_hz) +
                   ",cutoff=" + std::to_string(cutoff_hz);
        }
        return "?";
    }

    // True for the relations acting on PCM sample signals.
    bool signal_domain() const {
        return kind == relation_kind::bitdepth ||
               kind == relation_kind::downsample ||
               kind == relation_kind::bandlimit;
    }

    // True when the whole class can be listed for a small universe.
    bool enumerable() const {
        return kind == relation_kind::identity ||
               kind == relation_kind::multiset ||
               kind == relation_kind::parity ||
               kind == relation_kind::prefix_cylinder;
    }

    friend bool operator==(const relation_spec&, const relation_spec&) = default;
};

namespace detail {

inline std::uint32_t parse_u32_field(std::string_view text, std::string_view key,
                                     std::string_view whole) {
    auto fail = [&] {
        fail_usage("bad relation spec '" + std::string(whole) + "'");
    };
    if (text.size() <= key.size() + 1 || text.substr(0, key.size()) != key ||
        text[key.size()] != '=')
        fail();
    std::uint64_t value = 0;
    for (char c : text.substr(key.size() + 1)) {
        if (c < '0' || c > '9')
            fail();
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
        if (value > 0xFFFFFFFFull)
            fail();
    }
    return static_cast<std::uint32_t>(value);
}

} // namespace detail

inline relation_spec relation_spec::parse(std::string_view text) {
    if (text == "identity")
        return identity();
    if (text == "multiset")
        return multiset();
    if (text == "parity")
        return parity();
    if (text == "speech-band")
        return speech_band();
    auto colon = text.find(':');
    std::string_view head = text.substr(0, colon);
    std::string_view rest =
        colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (head == "cyl")
        return prefix_cylinder(detail::parse_u32_field(rest, "n", text));
    if (head == "bitdepth")
        return bitdepth(detail::parse_u32_field(rest, "k", text));
    if (head == "down")
        return downsample(detail::parse_u32_field(rest, "m", text));
    if (head == "band") {
        auto comma = rest.find(',');
        if (comma == std::string_view::npos)
            fail_usage("bad relation spec '" + std::string(text) + "'");
        std::uint32_t rate =
            detail::parse_u32_field(rest.substr(0, comma), "rate", text);
        std::uint32_t cutoff =
            detail::parse_u32_field(rest.substr(comma + 1), "cutoff", text);
        return bandlimit(rate, cutoff);
    }
    fail_usage("unknown relation spec '" + std::string(text) + "'");
}

// ============================================================================
// canonicalizers
// ============================================================================

namespace detail {

inline void require_encoding(const symbol_string& x, const relation_spec& spec) {
    if (spec.kind == relation_kind::identity)
        return;
    if (spec.signal_domain()) {
        if (x.tag() != encoding::pcm16)
            fail_data(std::string("relation ") + spec.to_text() +
                      " requires pcm16-mono input, got " + encoding_name(x.tag()));
    } else {
        if (x.tag() == encoding::pcm16)
            fail_data(std::string("relation ") + spec.to_text() +
                      " requires bits or bytes input, got pcm16-mono");
    }
}

inline symbol_string sort_symbols(const symbol_string& x) {
    if (x.tag() == encoding::bytes) {
        std::vector<std::uint8_t> bytes = x.payload();
        std::sort(bytes.begin(), bytes.end());
        return symbol_string::from_bytes(std::move(bytes));
    }
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < x.bit_length(); ++i)
        ones += x.bit(i) ? 1 : 0;
    std::string text(static_cast<std::size_t>(x.bit_length() - ones), '0');
    text.append(static_cast<std::size_t>(ones), '1');
    return symbol_string::from_bit_text(text);
}

inline symbol_string parity_bit(const symbol_string& x) {
    std::uint64_t ones = 0;
    for (std::uint8_t b : x.payload())
        ones += static_cast<std::uint64_t>(std::popcount(b));
    return symbol_string::from_bit_text(ones % 2 ? "1" : "0");
}

inline symbol_string zero_suffix(const symbol_string& x, std::uint32_t n) {
    if (n > x.bit_length())
        fail_data("prefix_cylinder n exceeds input length");
    std::string text = x.to_bit_text();
    std::fill(text.begin() + n, text.end(), '0');
    symbol_string out = symbol_string::from_bit_text(text);
    if (x.tag() == encoding::bytes)
        return symbol_string::from_bytes(std::vector<std::uint8_t>(
            out.payload().begin(), out.payload().end()));
    return out;
}

inline symbol_string mask_bitdepth(const symbol_string& x, std::uint32_t k) {
    std::vector<std::int16_t> s = x.samples();
    const std::uint16_t mask =
        static_cast<std::uint16_t>(0xFFFFu << (16 - k));
    for (auto& v : s)
        v = static_cast<std::int16_t>(static_cast<std::uint16_t>(v) & mask);
    return symbol_string::from_samples(s);
}

inline symbol_string keep_every_mth(const symbol_string& x, std::uint32_t m) {
    std::vector<std::int16_t> s = x.samples();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i % m != 0)
            s[i] = 0;
    return symbol_string::from_samples(s);
}

// One transform-round-clamp pass of the band-limiting projection.
inline std::vector<std::int16_t> bandpass_once(const std::vector<std::int16_t>& s,
                                               std::uint32_t rate,
                                               std::uint32_t cutoff) {
    const std::size_t n = s.size();
    if (n == 0)
        return {};
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = static_cast<double>(s[i]);
    std::vector<fft::cplx> spec = fft::forward_real(x);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t folded = std::min(k, n - k);
        double freq = static_cast<double>(folded) * rate / static_cast<double>(n);
        if (freq > static_cast<double>(cutoff))
            spec[k] = fft::cplx(0.0, 0.0);
    }
    std::vector<double> y = fft::inverse_to_real(std::move(spec));
    std::vector<std::int16_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::round(y[i]);
        r = std::clamp(r, -32768.0, 32767.0);
        out[i] = static_cast<std::int16_t>(r);
    }
    return out;
}

// Integer re-quantization makes a single pass only approximately a
// projection, so iterate the pass until the trajectory repeats. A repeat is
// usually a fixed point (within a few passes); a short limit cycle is also
// possible, and then the lexicographically smallest state of the cycle is the
// canonical form. Either way the result is deterministic and exactly
// idempotent: re-entering the map from the chosen state walks the same cycle
// and selects the same state.
inline symbol_string bandlimit_fixed_point(const symbol_string& x,
                                           std::uint32_t rate,
                                           std::uint32_t cutoff) {
    std::vector<std::vector<std::int16_t>> seen{x.samples()};
    for (int pass = 0; pass < 100; ++pass) {
        std::vector<std::int16_t> next = bandpass_once(seen.back(), rate, cutoff);
        for (std::size_t j = 0; j < seen.size(); ++j) {
            if (seen[j] != next)
                continue;
            // cycle = seen[j..back]; j == size-1 is the fixed-point case
            const std::vector<std::int16_t>* best = &seen[j];
            for (std::size_t i = j + 1; i < seen.size(); ++i)
                if (seen[i] < *best)
                    best = &seen[i];
            return symbol_string::from_samples(*best);
        }
        seen.push_back(std::move(next));
    }
    fail_data("bandlimit did not reach a fixed point or cycle");
}

} // namespace detail

inline symbol_string canonicalize(const symbol_string& x, const relation_spec& spec) {
    detail::require_encoding(x, spec);
    switch (spec.kind) {
    case relation_kind::identity: return x;
    case relation_kind::multiset: return detail::sort_symbols(x);
    case relation_kind::parity: return detail::parity_bit(x);
    case relation_kind::prefix_cylinder: return detail::zero_suffix(x, spec.n);
    case relation_kind::bitdepth: return detail::mask_bitdepth(x, spec.k);
    case relation_kind::downsample: return detail::keep_every_mth(x, spec.m);
    case relation_kind::bandlimit:
        return detail::bandlimit_fixed_point(x, spec.sample_rate_hz, spec.cutoff_hz);
    }
    fail_usage("unknown relation kind");
}

inline bool same_class(const symbol_string& x, const symbol_string& y,
                       const relation_spec& spec) {
    symbol_string cx = canonicalize(x, spec);
    symbol_string cy = canonicalize(y, spec);
    return cx.bit_length() == cy.bit_length() && cx.payload() == cy.payload();
}

// ============================================================================
// class enumeration for small universes
// ============================================================================

inline std::vector<symbol_string> enumerate_class(const symbol_string& x,
                                                  std::uint32_t universe_bits,
                                                  const relation_spec& spec) {
    if (!spec.enumerable())
        fail_usage("relation " + spec.to_text() + " is not enumerable");
    if (universe_bits > 20)
        fail_usage("class enumeration limited to universes of 20 bits");
    if (x.bit_length() != universe_bits)
        fail_data("input length does not match universe_bits");

    const std::uint32_t u = universe_bits;
    auto pack = [&](const symbol_string& s) {
        std::uint64_t v = 0;
        for (std::uint64_t i = 0; i < s.bit_length(); ++i)
            v = (v << 1) | (s.bit(i) ? 1u : 0u);
        return v;
    };

    std::vector<symbol_string> out;
    switch (spec.kind) {
    case relation_kind::identity:
        out.push_back(symbol_string::from_bit_value(pack(x), u));
        break;
    case relation_kind::multiset: {
        std::uint32_t ones = static_cast<std::uint32_t>(std::popcount(pack(x)));
        if (ones == 0) {
            out.push_back(symbol_string::from_bit_value(0, u));
            break;
        }
        // Gosper's hack walks same-popcount values in ascending order.
        std::uint64_t v = (1ull << ones) - 1;
        std::uint64_t limit = u == 64 ? ~0ull : (1ull << u);
        while (v < limit) {
            out.push_back(symbol_string::from_bit_value(v, u));
            std::uint64_t c = v & (~v + 1);
            std::uint64_t r = v + c;
            if (r >= limit || c == 0)
                break;
            v = (((r ^ v) >> 2) / c) | r;
        }
        break;
    }
    case relation_kind::parity: {
        std::uint32_t parity = static_cast<std::uint32_t>(std::popcount(pack(x))) % 2;
        for (std::uint64_t v = 0; v < (1ull << u); ++v)
            if (static_cast<std::uint32_t>(std::popcount(v)) % 2 == parity)
                out.push_back(symbol_string::from_bit_value(v, u));
        break;
    }
    case relation_kind::prefix_cylinder: {
        if (spec.n > u)
            fail_data("prefix_cylinder n exceeds universe_bits");
        std::uint64_t prefix = pack(x) >> (u - spec.n);
        std::uint32_t free_bits = u - spec.n;
        for (std::uint64_t sfx = 0; sfx < (1ull << free_bits); ++sfx)
            out.push_back(
                symbol_string::from_bit_value((prefix << free_bits) | sfx, u));
        break;
    }
    default:
        fail_usage("relation " + spec.to_text() + " is not enumerable");
    }
    return out;
}

} // namespace mcx
