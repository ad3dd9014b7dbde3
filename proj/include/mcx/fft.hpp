#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace mcx::fft {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

// In-place iterative radix-2 transform; n must be a power of two.
// inverse=true applies the conjugate transform without the 1/n scale.
inline void radix2_inplace(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1)
        return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * std::numbers::pi / static_cast<double>(len);
        if (!inverse)
            ang = -ang;
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Bluestein chirp transform: DFT of arbitrary length via one power-of-two
// convolution. The chirp exponent is reduced mod 2n before the complex
// exponential so large indices lose no precision.
inline std::vector<cplx> bluestein(const std::vector<cplx>& in, bool inverse) {
    const std::size_t n = in.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t sq = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        double ang = sign * std::numbers::pi * static_cast<double>(sq) /
                     static_cast<double>(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cplx> a(m, cplx(0.0, 0.0));
    std::vector<cplx> b(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = in[k] * chirp[k];
        b[k] = std::conj(chirp[k]);
    }
    for (std::size_t k = 1; k < n; ++k)
        b[m - k] = std::conj(chirp[k]);
    radix2_inplace(a, false);
    radix2_inplace(b, false);
    for (std::size_t k = 0; k < m; ++k)
        a[k] *= b[k];
    radix2_inplace(a, true);
    const double scale = 1.0 / static_cast<double>(m);
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = a[k] * scale * chirp[k];
    return out;
}

// Unscaled forward (inverse=false) or conjugate (inverse=true) DFT of any
// length. Callers divide by n after the inverse pass.
inline std::vector<cplx> transform(std::vector<cplx> in, bool inverse) {
    if (in.size() <= 1)
        return in;
    if (is_pow2(in.size())) {
        radix2_inplace(in, inverse);
        return in;
    }
    return bluestein(in, inverse);
}

inline std::vector<cplx> forward_real(const std::vector<double>& in) {
    std::vector<cplx> buf(in.size());
    for (std::size_t i = 0; i < in.size(); ++i)
        buf[i] = cplx(in[i], 0.0);
    return transform(std::move(buf), false);
}

inline std::vector<double> inverse_to_real(std::vector<cplx> spectrum) {
    const std::size_t n = spectrum.size();
    spectrum = transform(std::move(spectrum), true);
    std::vector<double> out(n);
    const double scale = n ? 1.0 / static_cast<double>(n) : 1.0;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = spectrum[i].real() * scale;
    return out;
}

} // namespace mcx::fft
