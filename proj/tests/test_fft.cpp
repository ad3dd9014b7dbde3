#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "mcx/fft.hpp"

namespace {

// Reference quadratic-time transform the fast paths are checked against.
std::vector<mcx::fft::cplx> naive_dft(const std::vector<mcx::fft::cplx>& in,
                                      bool inverse) {
    const std::size_t n = in.size();
    std::vector<mcx::fft::cplx> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        mcx::fft::cplx sum = 0;
        for (std::size_t t = 0; t < n; ++t) {
            double angle = sign * 2.0 * std::numbers::pi *
                           static_cast<double>(k * t % n) / static_cast<double>(n);
            sum += in[t] * mcx::fft::cplx(std::cos(angle), std::sin(angle));
        }
        out[k] = sum;
    }
    return out;
}

double max_err(const std::vector<mcx::fft::cplx>& a,
               const std::vector<mcx::fft::cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("transform matches the quadratic reference at many lengths") {
    std::mt19937_64 rng(3);
    for (std::size_t n :
         {1u, 2u, 3u, 4u, 5u, 7u, 8u, 12u, 15u, 16u, 17u, 31u, 64u, 96u, 100u}) {
        std::vector<mcx::fft::cplx> in(n);
        for (auto& v : in)
            v = mcx::fft::cplx(
                static_cast<double>(static_cast<std::int32_t>(rng() % 2001) - 1000),
                static_cast<double>(static_cast<std::int32_t>(rng() % 2001) - 1000));
        for (bool inverse : {false, true}) {
            auto fast = mcx::fft::transform(in, inverse);
            auto slow = naive_dft(in, inverse);
            REQUIRE(max_err(fast, slow) < 1e-6 * (1.0 + static_cast<double>(n)));
        }
    }
}

TEST_CASE("power-of-two and bluestein paths agree") {
    std::mt19937_64 rng(5);
    std::vector<mcx::fft::cplx> in(64);
    for (auto& v : in)
        v = mcx::fft::cplx(static_cast<double>(rng() % 100),
                           static_cast<double>(rng() % 100));
    auto a = mcx::fft::transform(in, false);
    auto b = mcx::fft::bluestein(in, false);
    REQUIRE(max_err(a, b) < 1e-6);
}

TEST_CASE("real round trip recovers the signal") {
    std::mt19937_64 rng(9);
    for (std::size_t n : {1u, 2u, 17u, 480u, 1000u}) {
        std::vector<double> x(n);
        for (auto& v : x)
            v = static_cast<double>(static_cast<std::int32_t>(rng() % 65536) - 32768);
        auto back = mcx::fft::inverse_to_real(mcx::fft::forward_real(x));
        REQUIRE(back.size() == n);
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE(std::abs(back[i] - x[i]) < 1e-5);
    }
}

TEST_CASE("forward transform of a pure exact-bin tone is two spikes") {
    const std::size_t n = 480;
    const std::size_t bin = 7;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(bin * t) /
                        static_cast<double>(n));
    auto spec = mcx::fft::forward_real(x);
    for (std::size_t k = 0; k < n; ++k) {
        double mag = std::abs(spec[k]);
        if (k == bin || k == n - bin)
            REQUIRE(mag > static_cast<double>(n) / 4.0);
        else
            REQUIRE(mag < 1e-6 * static_cast<double>(n));
    }
}
