#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "core.hpp"
#include "fft.hpp"
#include "io.hpp"

namespace mcx::synth {

// ============================================================================
// seeded generator (fixed algorithm, so fixtures are stable across builds)
// ============================================================================

struct splitmix64 {
    std::uint64_t state;

    explicit splitmix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::vector<std::uint8_t> random_bytes(std::uint64_t seed, std::size_t n) {
    splitmix64 rng(seed);
    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<std::uint8_t>(rng.next() & 0xFF);
    return out;
}

inline symbol_string random_bits(std::uint64_t seed, std::uint64_t nbits) {
    splitmix64 rng(seed);
    std::string text;
    text.reserve(nbits);
    for (std::uint64_t i = 0; i < nbits; ++i)
        text.push_back((rng.next() & 1) ? '1' : '0');
    return symbol_string::from_bit_text(text);
}

// ============================================================================
// tone + band-restricted noise signals
// ============================================================================

struct band_noise_spec {
    std::uint32_t low_hz = 0;   // inclusive, must be an exact DFT bin
    std::uint32_t high_hz = 0;  // inclusive
    std::uint32_t step_hz = 0;
    double rms = 0.0;
};

// Sum of exact-bin sinusoids with seeded random phases. Exact bins keep the
// noise strictly inside [low, high]; no spectral leakage below it.
inline std::vector<double> render_band_noise(std::uint32_t n, std::uint32_t rate,
                                             const band_noise_spec& spec,
                                             splitmix64& rng) {
    std::vector<double> out(n, 0.0);
    if (spec.rms <= 0.0 || spec.step_hz == 0)
        return out;
    std::size_t bins = 0;
    for (std::uint32_t f = spec.low_hz; f <= spec.high_hz; f += spec.step_hz)
        ++bins;
    const double amp = spec.rms * std::sqrt(2.0 / static_cast<double>(bins));
    for (std::uint32_t f = spec.low_hz; f <= spec.high_hz; f += spec.step_hz) {
        if (static_cast<std::uint64_t>(f) * n % rate != 0)
            fail_usage("noise frequency " + std::to_string(f) +
                       " is not an exact bin for this length");
        const double phase = 2.0 * std::numbers::pi * rng.unit();
        const double w = 2.0 * std::numbers::pi * f / static_cast<double>(rate);
        for (std::uint32_t t = 0; t < n; ++t)
            out[t] += amp * std::sin(w * t + phase);
    }
    return out;
}

// Crest-limited variant: clip/re-project rounds push the multitone's peak
// toward its rms so a given peak budget carries more noise power. The
// projection keeps exactly the allowed bins, so the last round restores
// band purity no matter what the clipping smeared.
inline std::vector<double> crest_limited_band_noise(std::uint32_t n,
                                                    std::uint32_t rate,
                                                    const band_noise_spec& spec,
                                                    double peak_target,
                                                    splitmix64& rng) {
    std::vector<double> x = render_band_noise(n, rate, spec, rng);
    std::vector<bool> keep(n, false);
    for (std::uint32_t f = spec.low_hz; f <= spec.high_hz; f += spec.step_hz) {
        std::uint64_t k = static_cast<std::uint64_t>(f) * n / rate;
        keep[k] = true;
        keep[n - k] = true;
    }
    for (int round = 0; round < 6; ++round) {
        for (double& v : x)
            v = std::clamp(v, -peak_target, peak_target);
        std::vector<fft::cplx> bins = fft::forward_real(x);
        for (std::uint32_t k = 0; k < n; ++k)
            if (!keep[k])
                bins[k] = 0.0;
        x = fft::inverse_to_real(bins);
    }
    double peak = 0.0;
    for (double v : x)
        peak = std::max(peak, std::abs(v));
    if (peak > peak_target)
        for (double& v : x)
            v *= peak_target / peak;
    return x;
}

inline std::vector<std::int16_t> quantize_signal(const std::vector<double>& x) {
    std::vector<std::int16_t> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = std::round(x[i]);
        if (r > 32767.0 || r < -32768.0)
            fail_data("synthesized fixture clips; adjust amplitudes");
        out[i] = static_cast<std::int16_t>(r);
    }
    return out;
}

struct tone_spec {
    std::uint32_t freq_hz = 0;
    double amplitude = 0.0;
};

inline std::vector<std::int16_t> tone_plus_noise(std::uint32_t n, std::uint32_t rate,
                                                 const tone_spec& tone,
                                                 const band_noise_spec& noise,
                                                 std::uint64_t seed) {
    if (static_cast<std::uint64_t>(tone.freq_hz) * n % rate != 0)
        fail_usage("tone frequency is not an exact bin for this length");
    splitmix64 rng(seed);
    const double phase = 2.0 * std::numbers::pi * rng.unit();
    std::vector<double> x = render_band_noise(n, rate, noise, rng);
    const double w = 2.0 * std::numbers::pi * tone.freq_hz / static_cast<double>(rate);
    for (std::uint32_t t = 0; t < n; ++t)
        x[t] += tone.amplitude * std::sin(w * t + phase);
    return quantize_signal(x);
}

// ============================================================================
// named fixtures
// ============================================================================

// One second at 48 kHz: a 200 Hz tone plus crest-limited noise occupying
// 3.2-24 kHz, all on exact bins so nothing leaks below the 3 kHz speech
// cutoff. The bin spacing shares no common divisor with the length, so the
// raw mixture never repeats within the second.
inline std::vector<std::int16_t> sine200hz_plus_hf_noise(std::uint64_t seed) {
    const std::uint32_t n = 48000, rate = 48000;
    tone_spec tone{200, 2500.0};
    band_noise_spec noise{3203, 23999, 41, 9000.0};
    splitmix64 rng(seed);
    const double phase = 2.0 * std::numbers::pi * rng.unit();
    std::vector<double> x =
        crest_limited_band_noise(n, rate, noise, 30000.0, rng);
    const double w =
        2.0 * std::numbers::pi * tone.freq_hz / static_cast<double>(rate);
    for (std::uint32_t t = 0; t < n; ++t)
        x[t] += tone.amplitude * std::sin(w * t + phase);
    return quantize_signal(x);
}

inline void write_sine_fixture(const std::string& path, std::uint64_t seed) {
    write_file_bytes(path, render_wav(sine200hz_plus_hf_noise(seed), 48000));
}

struct corpus_params {
    std::uint64_t seed = 1;
    std::uint32_t per_class = 20; // even: exemplars come in same-frequency pairs
    std::uint32_t samples = 12000;
    std::uint32_t rate = 48000;
    double snr_db = -10.0; // tone power relative to out-of-band noise power
    double tone_amplitude = 2600.0;
};

// Two-band corpus: class "low" holds 200-380 Hz tones, class "high" holds
// 5.0-5.9 kHz tones, both buried in 6-20 kHz noise at the configured SNR.
// Exemplars come in same-frequency pairs that share the tone phase but carry
// independent noise, so each held-out item leaves a twin behind whose
// canonical form matches after the noise band is stripped.
inline void write_two_band_corpus(const std::string& dir,
                                  const corpus_params& p) {
    namespace fs = std::filesystem;
    if (p.per_class == 0 || p.per_class % 2)
        fail_usage("per-class count must be a positive even number");
    const double tone_rms = p.tone_amplitude / std::numbers::sqrt2;
    const double noise_rms = tone_rms * std::pow(10.0, -p.snr_db / 20.0);
    band_noise_spec noise{6000, 20000, 40, noise_rms};

    struct band {
        const char* label;
        std::uint32_t base_hz;
        std::uint32_t step_hz;
    };
    const band bands[2] = {{"low", 200, 20}, {"high", 5000, 100}};

    std::uint64_t stream = 0;
    std::uint64_t band_index = 0;
    for (const band& b : bands) {
        fs::create_directories(fs::path(dir) / b.label);
        for (std::uint32_t i = 0; i < p.per_class; ++i) {
            std::uint32_t freq = b.base_hz + b.step_hz * (i / 2);
            if (static_cast<std::uint64_t>(freq) * p.samples % p.rate != 0)
                fail_usage("tone frequency is not an exact bin for this length");
            splitmix64 pair_rng(p.seed * 0x10001ull + band_index * 1000003ull +
                                (i / 2) * 2654435761ull);
            const double phase = 2.0 * std::numbers::pi * pair_rng.unit();
            splitmix64 noise_rng(p.seed * 0x20002ull + (stream++));
            std::vector<double> x =
                render_band_noise(p.samples, p.rate, noise, noise_rng);
            const double w =
                2.0 * std::numbers::pi * freq / static_cast<double>(p.rate);
            for (std::uint32_t t = 0; t < p.samples; ++t)
                x[t] += p.tone_amplitude * std::sin(w * t + phase);
            char name[64];
            std::snprintf(name, sizeof name, "%s_%02u_f%u.wav", b.label, i, freq);
            write_file_bytes((fs::path(dir) / b.label / name).string(),
                             render_wav(quantize_signal(x), p.rate));
        }
        ++band_index;
    }
}

} // namespace mcx::synth
