#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "mcx/compressors.hpp"
#include "test_support.hpp"

using mcx::lz78_length;

namespace {

std::vector<std::uint8_t> text(const char* s) {
    return std::vector<std::uint8_t>(s, s + std::string_view(s).size());
}

// Recompute the bit cost straight from the phrase list, independently of
// lz78_length's accumulation.
std::uint64_t cost_of(const std::vector<mcx::lz78_phrase>& phrases) {
    std::uint64_t bits = 0;
    std::uint64_t dict = 0;
    for (const auto& p : phrases) {
        std::uint64_t index = dict + 1;
        std::uint32_t w = 0;
        while ((1ull << w) < index)
            ++w;
        bits += w;
        if (p.literal >= 0) {
            bits += 8;
            ++dict;
        }
    }
    return bits;
}

} // namespace

TEST_CASE("lz78 cost of small inputs") {
    REQUIRE(lz78_length({}) == 0);
    REQUIRE(lz78_length(text("a")) == 8);
    // phrases a | aa | a: 0+8, 1+8, then 2 index bits for the exact tail match
    REQUIRE(lz78_length(text("aaaa")) == 19);
}

TEST_CASE("parsing round trips through the decoder with matching cost") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        std::size_t n = rng() % 2048;
        std::vector<std::uint8_t> data;
        if (i % 3 == 0)
            data.assign(n, static_cast<std::uint8_t>(rng() & 3));
        else if (i % 3 == 1)
            for (std::size_t j = 0; j < n; ++j)
                data.push_back(static_cast<std::uint8_t>(rng() & 1 ? 'x' : 'y'));
        else
            data = testsup::random_bytes(rng, n);
        auto phrases = mcx::lz78_parse(data);
        REQUIRE(mcx::lz78_decode(phrases) == data);
        REQUIRE(cost_of(phrases) == lz78_length(data));
    }
}

TEST_CASE("repetition compresses and noise does not") {
    std::mt19937_64 rng(11);
    std::vector<std::uint8_t> repeated(10000, 'a');
    std::vector<std::uint8_t> noise = testsup::random_bytes(rng, 1000);
    REQUIRE(lz78_length(repeated) < lz78_length(noise));
    REQUIRE(lz78_length(noise) > 8 * 500);
    REQUIRE(lz78_length(repeated) < 8 * 10000 / 10);
}

TEST_CASE("doubling an input never doubles its cost") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 50; ++i) {
        std::size_t n = 64 + rng() % 512;
        std::vector<std::uint8_t> x = testsup::random_bytes(rng, n);
        std::vector<std::uint8_t> xx = x;
        xx.insert(xx.end(), x.begin(), x.end());
        REQUIRE(lz78_length(xx) < 2 * lz78_length(x) + 16);
    }
}

TEST_CASE("compressor parsing") {
    REQUIRE(mcx::parse_compressor("lz78").name == "lz78");
    REQUIRE(mcx::parse_compressor("ext:cat").name == "ext:cat");
    for (const char* bad : {"", "lz77", "ext:", "gzip"})
        REQUIRE(testsup::thrown_kind([bad] { mcx::parse_compressor(bad); }) ==
                mcx::error_kind::usage);
}

TEST_CASE("a pass-through external tool counts exactly its output bits") {
    mcx::compressor cat = mcx::parse_compressor("ext:cat");
    std::mt19937_64 rng(17);
    std::vector<std::uint8_t> data = testsup::random_bytes(rng, 100);
    REQUIRE(cat.code_length(data) == 800);
    REQUIRE(cat.code_length({}) == 0);
    // a second run of the same filter must agree bit for bit
    REQUIRE(cat.code_length(data) == cat.code_length(data));
}

TEST_CASE("external tool output is pumped even when it exceeds the pipe buffer") {
    std::mt19937_64 rng(19);
    std::vector<std::uint8_t> data = testsup::random_bytes(rng, 1 << 20);
    REQUIRE(mcx::parse_compressor("ext:cat").code_length(data) == 8ull << 20);
}

TEST_CASE("gzip beats the identity bound on compressible data") {
    std::vector<std::uint8_t> data(20000);
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<std::uint8_t>("abcd"[i % 4]);
    std::uint64_t bits = mcx::parse_compressor("ext:gzip -c").code_length(data);
    REQUIRE(bits > 0);
    REQUIRE(bits < 8 * data.size() / 10);
    REQUIRE(mcx::parse_compressor("ext:gzip -c").code_length(data) == bits);
}

TEST_CASE("a failing external tool surfaces its exit status") {
    mcx::compressor bad = mcx::parse_compressor("ext:sh -c 'exit 3'");
    try {
        bad.code_length(text("abc"));
        FAIL("expected an error");
    } catch (const mcx::error& e) {
        REQUIRE(e.kind() == mcx::error_kind::tool);
        REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("exit 3"));
    }
}

TEST_CASE("a missing external tool is reported, not silently zero") {
    mcx::compressor gone = mcx::parse_compressor("ext:mcx-no-such-tool-xyz");
    REQUIRE(testsup::thrown_kind([&] { gone.code_length(text("abc")); }) ==
            mcx::error_kind::tool);
}

TEST_CASE("a tool that stops reading its input early is an error") {
    std::mt19937_64 rng(23);
    std::vector<std::uint8_t> data = testsup::random_bytes(rng, 1 << 20);
    mcx::compressor head = mcx::parse_compressor("ext:head -c 10");
    try {
        head.code_length(data);
        FAIL("expected an error");
    } catch (const mcx::error& e) {
        REQUIRE(e.kind() == mcx::error_kind::tool);
        REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("input early"));
    }
}
