#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <random>

#include "mcx/estimators.hpp"
#include "mcx/oracle.hpp"
#include "test_support.hpp"

using namespace mcx;
using testsup::bits;

namespace {

estimator_config config(relation_spec rel) {
    estimator_config cfg;
    cfg.relation = rel;
    return cfg;
}

symbol_string random_input(std::mt19937_64& rng, std::size_t n) {
    return symbol_string::from_bytes(testsup::random_bytes(rng, n));
}

} // namespace

TEST_CASE("distance mode names") {
    REQUIRE(parse_distance_mode("max") == distance_mode::max_bits);
    REQUIRE(parse_distance_mode("ncd") == distance_mode::normalized);
    REQUIRE(parse_distance_mode("sum") == distance_mode::normalized_sum);
    REQUIRE(testsup::thrown_kind([] { parse_distance_mode("euclid"); }) ==
            mcx::error_kind::usage);
}

TEST_CASE("the identity relation collapses the estimate") {
    std::mt19937_64 rng(41);
    estimator_config cfg = config(relation_spec::identity());
    for (int i = 0; i < 300; ++i) {
        symbol_string x = random_input(rng, rng() % 512);
        complexity_report rep = boltzmann_estimate(x, cfg);
        REQUIRE(rep.s_hat_bits == rep.k_hat_bits);
        REQUIRE(rep.entropy_estimate_bits == 0.0);
        REQUIRE(rep.cardinality_estimate == 1.0);
    }
}

TEST_CASE("canonical forms cost at most a small overhead over their members") {
    // sorting can nudge lz78's phrase structure either way; what must never
    // happen is the canonical form costing substantially more than the input
    std::mt19937_64 rng(43);
    for (int i = 0; i < 100; ++i) {
        symbol_string x = random_input(rng, 64 + rng() % 256);
        complexity_report m = boltzmann_estimate(x, config(relation_spec::multiset()));
        REQUIRE(m.s_hat_bits <= 1.1 * m.k_hat_bits + 64.0);
        double expected = std::exp2(m.entropy_estimate_bits);
        if (std::isfinite(expected))
            REQUIRE(m.cardinality_estimate == Catch::Approx(expected));
        else
            REQUIRE(std::isinf(m.cardinality_estimate));

        symbol_string y = bits(testsup::random_bit_text(rng, 64 + rng() % 64));
        complexity_report c =
            boltzmann_estimate(y, config(relation_spec::prefix_cylinder(8)));
        REQUIRE(c.s_hat_bits <= c.k_hat_bits + 16.0);
    }
}

TEST_CASE("sorting typically discards real information") {
    std::mt19937_64 rng(47);
    double entropy_sum = 0.0;
    for (int i = 0; i < 40; ++i)
        entropy_sum += boltzmann_estimate(random_input(rng, 1024),
                                          config(relation_spec::multiset()))
                           .entropy_estimate_bits;
    REQUIRE(entropy_sum / 40.0 > 100.0);
}

TEST_CASE("an input explains itself better than an independent one") {
    std::mt19937_64 rng(53);
    estimator_config cfg = config(relation_spec::identity());
    for (int i = 0; i < 50; ++i) {
        prepared_input x = prepare(random_input(rng, 512), cfg);
        prepared_input y = prepare(random_input(rng, 512), cfg);
        double self = conditional_macrocomplexity(x, x, cfg).value;
        double other = conditional_macrocomplexity(x, y, cfg).value;
        REQUIRE(self < other);
    }
}

TEST_CASE("clamping is a config choice and the raw value survives") {
    // a deliberately non-monotone code length makes the raw difference
    // negative, which real compressors almost never do
    estimator_config cfg = config(relation_spec::identity());
    cfg.comp = {"toy", [](const std::vector<std::uint8_t>& d) {
                    return static_cast<std::uint64_t>(
                        d.size() < 200 ? 200 - d.size() : 0);
                }};
    std::mt19937_64 rng(59);
    prepared_input a = prepare(symbol_string::from_bytes(std::string_view("")), cfg);
    prepared_input b = prepare(random_input(rng, 100), cfg);

    conditional_result clamped = conditional_macrocomplexity(a, b, cfg);
    REQUIRE(clamped.raw < 0.0);
    REQUIRE(clamped.value == 0.0);

    cfg.clamp_negative_conditionals = false;
    conditional_result raw = conditional_macrocomplexity(a, b, cfg);
    REQUIRE(raw.value == raw.raw);
    REQUIRE(raw.value < 0.0);
}

TEST_CASE("distances are symmetric in every mode") {
    std::mt19937_64 rng(61);
    estimator_config cfg = config(relation_spec::multiset());
    for (int i = 0; i < 200; ++i) {
        prepared_input a = prepare(random_input(rng, 1 + rng() % 256), cfg);
        prepared_input b = prepare(random_input(rng, 1 + rng() % 256), cfg);
        for (distance_mode mode :
             {distance_mode::max_bits, distance_mode::normalized,
              distance_mode::normalized_sum}) {
            double ab = pair_distance(a, b, cfg, mode);
            double ba = pair_distance(b, a, cfg, mode);
            REQUIRE(ab == ba);
            REQUIRE(ab >= 0.0);
        }
    }
}

TEST_CASE("normalized distances agree with their definition") {
    std::mt19937_64 rng(67);
    estimator_config cfg = config(relation_spec::identity());
    prepared_input a = prepare(random_input(rng, 300), cfg);
    prepared_input b = prepare(random_input(rng, 200), cfg);
    double cab = conditional_macrocomplexity(a, b, cfg).value;
    double cba = conditional_macrocomplexity(b, a, cfg).value;
    double denom = std::max(a.s_bits, b.s_bits);
    REQUIRE(pair_distance(a, b, cfg, distance_mode::normalized) ==
            Catch::Approx(std::max(cab, cba) / denom));
    REQUIRE(pair_distance(a, b, cfg, distance_mode::normalized_sum) ==
            Catch::Approx((cab + cba) / denom));
    REQUIRE(pair_distance(a, b, cfg, distance_mode::normalized_sum) >=
            pair_distance(a, b, cfg, distance_mode::normalized));
}

TEST_CASE("normalizing two empty inputs is an error, raw bits are not") {
    estimator_config cfg = config(relation_spec::identity());
    prepared_input e = prepare(symbol_string::from_bytes(std::string_view("")), cfg);
    REQUIRE(testsup::thrown_kind([&] {
                pair_distance(e, e, cfg, distance_mode::normalized);
            }) == mcx::error_kind::data);
    REQUIRE(pair_distance(e, e, cfg, distance_mode::max_bits) >= 0.0);
}

TEST_CASE("conditioning across incompatible encodings is an error") {
    estimator_config cfg = config(relation_spec::identity());
    prepared_input b = prepare(bits("0101"), cfg);
    prepared_input p = prepare(symbol_string::from_samples({1, 2, 3}), cfg);
    REQUIRE(testsup::thrown_kind([&] {
                conditional_macrocomplexity(b, p, cfg);
            }) == mcx::error_kind::data);
}

TEST_CASE("with the exact oracle as compressor the estimate is the true value") {
    auto t = std::make_shared<oracle::enumeration_table>(oracle::enumerate_programs(16));
    estimator_config cfg = config(relation_spec::multiset());
    cfg.comp = oracle::make_oracle_compressor(t);
    for (std::uint64_t v = 0; v < 256; ++v) {
        symbol_string x = symbol_string::from_bit_value(v, 8);
        oracle::macro_result exact =
            oracle::exact_macrocomplexity(x, relation_spec::multiset(), 8, *t);
        REQUIRE(exact.exact);
        REQUIRE(s_hat(x, cfg) == static_cast<double>(exact.min_bits));
    }
}
