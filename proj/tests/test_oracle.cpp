#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "mcx/oracle.hpp"
#include "test_support.hpp"

using namespace mcx::oracle;
using mcx::relation_spec;
using mcx::symbol_string;
using testsup::bits;

namespace {

const enumeration_table& table_at(std::uint32_t L) {
    static std::map<std::uint32_t, enumeration_table> cache;
    auto it = cache.find(L);
    if (it == cache.end())
        it = cache.emplace(L, enumerate_programs(L)).first;
    return it->second;
}

// Count of halting programs of exactly n bits, straight from the grammar:
// a program is an instruction (2 emit forms of 2 bits, 16 repeat forms of
// 6 bits) followed by a program, or the 2-bit halt.
std::uint64_t exact_count(std::uint32_t n) {
    if (n < 2 || n % 2)
        return 0;
    if (n == 2)
        return 1;
    std::uint64_t total = 2 * exact_count(n - 2);
    if (n >= 8)
        total += 16 * exact_count(n - 6);
    return total;
}

std::uint64_t cumulative_count(std::uint32_t L) {
    std::uint64_t total = 0;
    for (std::uint32_t n = 2; n <= L; ++n)
        total += exact_count(n);
    return total;
}

} // namespace

TEST_CASE("the interpreter reproduces the worked examples") {
    auto run = [](const char* prog) { return run_program(bits(prog), 64); };

    run_outcome halt = run("11");
    REQUIRE(halt.status == parse_status::halting);
    REQUIRE(halt.output == bits(""));

    run_outcome zero = run("0011");
    REQUIRE(zero.status == parse_status::halting);
    REQUIRE(zero.output == bits("0"));

    run_outcome repeat = run("10110011");
    REQUIRE(repeat.status == parse_status::halting);
    REQUIRE(repeat.output == bits("00000000"));

    REQUIRE(run("10").status == parse_status::truncated);
    REQUIRE(run("0101").status == parse_status::truncated);

    run_outcome overlong = run("1100");
    REQUIRE(overlong.status != parse_status::halting);
    REQUIRE(overlong.overlong);

    run_outcome capped = run_program(bits("10111011"), 4);
    REQUIRE(capped.status == parse_status::overrun);
}

TEST_CASE("packed and general interpreters agree everywhere") {
    for (std::uint32_t len = 2; len <= 12; ++len) {
        for (std::uint64_t v = 0; v < (1ull << len); ++v) {
            packed_run_result p = run_bits_packed(v, len, 64);
            run_outcome g = run_program(symbol_string::from_bit_value(v, len), 64);
            REQUIRE(p.status == g.status);
            REQUIRE(p.overlong == g.overlong);
            if (p.status == parse_status::halting) {
                REQUIRE(p.out_len == g.output.bit_length());
                REQUIRE(symbol_string::from_bit_value(p.out, p.out_len) ==
                        g.output);
            }
        }
    }
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        std::uint32_t len = 13 + rng() % 8;
        std::uint64_t v = rng() & ((1ull << len) - 1);
        packed_run_result p = run_bits_packed(v, len, 64);
        run_outcome g = run_program(symbol_string::from_bit_value(v, len), 64);
        REQUIRE(p.status == g.status);
        if (p.status == parse_status::halting)
            REQUIRE(symbol_string::from_bit_value(p.out, p.out_len) == g.output);
    }
}

TEST_CASE("the L=2 table is the single halting program") {
    const enumeration_table& t = table_at(2);
    REQUIRE(t.entries.size() == 1);
    const table_entry& e = t.entries.at(output_key::of(bits("")));
    REQUIRE(e.min_program_bits == 2);
    REQUIRE(e.mass == dyadic::pow2_neg(2));
    REQUIRE(t.total_mass == dyadic::pow2_neg(2));
}

TEST_CASE("small-table entries carry the expected exact masses") {
    const enumeration_table& t6 = table_at(6);
    const table_entry& zero = t6.entries.at(output_key::of(bits("0")));
    REQUIRE(zero.min_program_bits == 4);
    REQUIRE(zero.mass == dyadic::pow2_neg(4));

    // "00" is reached by 0000 11 and later by 10 000 0 11
    const enumeration_table& t8 = table_at(8);
    const table_entry& pair = t8.entries.at(output_key::of(bits("00")));
    REQUIRE(pair.min_program_bits == 6);
    REQUIRE(pair.mass == (dyadic{5, 8}));
}

TEST_CASE("plain complexity of the reference strings") {
    REQUIRE(exact_complexity(bits(""), table_at(2)) == 2);
    REQUIRE(exact_complexity(bits("0"), table_at(6)) == 4);
    REQUIRE(exact_complexity(bits("00000000"), table_at(14)) == 8);
    REQUIRE(exact_complexity(bits("01101001"), table_at(18)) == 18);

    REQUIRE_THROWS_WITH(exact_complexity(bits("01101001"), table_at(6)),
                        Catch::Matchers::ContainsSubstring("unknown"));
}

TEST_CASE("universal probability dominates the first-order term") {
    probability_result empty = universal_probability(bits(""), table_at(14));
    REQUIRE(empty.mass == dyadic::pow2_neg(2));
    REQUIRE(empty.min_bits == 2);
    REQUIRE(empty.ratio == 1.0);

    probability_result one_zero = universal_probability(bits("0"), table_at(6));
    REQUIRE(one_zero.mass == dyadic::pow2_neg(4));

    const enumeration_table& t14 = table_at(14);
    for (const auto& [key, entry] : t14.entries) {
        probability_result r = universal_probability(key, t14);
        REQUIRE(dyadic::pow2_neg(r.min_bits) <= r.mass);
        REQUIRE(r.ratio >= 1.0);
    }
}

TEST_CASE("grammar walk and raw scan build identical tables") {
    enumeration_table walk = enumerate_programs(16);
    enumeration_table scan = enumerate_programs_by_scan(16);
    REQUIRE(walk.entries.size() == scan.entries.size());
    for (const auto& [key, e] : walk.entries) {
        const table_entry* s = find_entry(key, scan);
        REQUIRE(s != nullptr);
        REQUIRE(s->min_program_bits == e.min_program_bits);
        REQUIRE(s->mass == e.mass);
    }
    REQUIRE(walk.total_mass == scan.total_mass);
}

TEST_CASE("the halting-program listing matches the grammar count") {
    std::vector<program_record> p16 = list_halting_programs(16);
    REQUIRE(p16.size() == cumulative_count(16));
    REQUIRE(verify_prefix_free(p16));

    // total mass recomputed from the listing, not from the table
    dyadic mass;
    for (const auto& p : p16)
        mass += dyadic::pow2_neg(p.prog_len);
    REQUIRE(mass == table_at(16).total_mass);
}

TEST_CASE("halting mass obeys the Kraft bound as L grows") {
    dyadic prev;
    for (std::uint32_t L : {2u, 6u, 10u, 14u, 18u, 20u}) {
        dyadic total = table_at(L).total_mass;
        REQUIRE(total <= dyadic::one());
        REQUIRE(prev <= total);
        prev = total;
    }
}

TEST_CASE("raising L refines the table monotonically") {
    const enumeration_table& t12 = table_at(12);
    const enumeration_table& t14 = table_at(14);
    REQUIRE(t12.entries.size() <= t14.entries.size());
    for (const auto& [key, e12] : t12.entries) {
        const table_entry* e14 = find_entry(key, t14);
        REQUIRE(e14 != nullptr);
        // the minimal program is already inside the smaller horizon
        REQUIRE(e14->min_program_bits == e12.min_program_bits);
        REQUIRE(e12.mass <= e14->mass);
    }
}

TEST_CASE("macrocomplexity picks the cheapest class member and names it") {
    macro_result m = exact_macrocomplexity(bits("01101001"),
                                           relation_spec::multiset(), 8,
                                           table_at(14));
    REQUIRE(m.exact);
    REQUIRE(m.min_bits == 14);
    REQUIRE(m.class_size == 70);
    REQUIRE(m.witness == bits("00001111"));

    // the member itself costs 18, the class floor stays 14
    REQUIRE(exact_macrocomplexity(bits("01101001"), relation_spec::multiset(), 8,
                                  table_at(18))
                .min_bits == 14);

    macro_result id = exact_macrocomplexity(bits("01101001"),
                                            relation_spec::identity(), 8,
                                            table_at(18));
    REQUIRE(id.min_bits == 18);
    REQUIRE(id.witness == bits("01101001"));

    macro_result unreached = exact_macrocomplexity(
        bits("01101001"), relation_spec::identity(), 8, table_at(6));
    REQUIRE_FALSE(unreached.exact);
    REQUIRE(unreached.min_bits == 7); // reported as the L+1 lower bound
    REQUIRE(unreached.reached_members == 0);
}

TEST_CASE("class mass sums the member masses exactly") {
    // the whole one-bit universe as a single class
    class_probability_result whole = class_universal_probability(
        bits("0"), relation_spec::prefix_cylinder(0), 1, table_at(6));
    REQUIRE(whole.class_size == 2);
    REQUIRE(whole.reached_members == 2);
    REQUIRE(whole.mass == (dyadic{1, 3}));

    class_probability_result pairs = class_universal_probability(
        bits("0011"), relation_spec::multiset(), 4, table_at(14));
    REQUIRE(pairs.class_size == 6);
    REQUIRE(pairs.reached_members == 6);
    dyadic by_hand;
    for (const char* member :
         {"0011", "0101", "0110", "1001", "1010", "1100"})
        by_hand += universal_probability(bits(member), table_at(14)).mass;
    REQUIRE(pairs.mass == by_hand);
}

TEST_CASE("conditionals and distances match a direct table scan") {
    const enumeration_table& t = table_at(16);

    // independent route: minimum over same-class strings of the full length,
    // found by scanning every string of that length through the canonicalizer
    auto class_min = [&](const symbol_string& x, const relation_spec& rel) {
        std::uint32_t len = static_cast<std::uint32_t>(x.bit_length());
        symbol_string canon = canonicalize(x, rel);
        std::uint32_t best = 0;
        bool found = false;
        for (std::uint64_t v = 0; v < (1ull << len); ++v) {
            symbol_string y = symbol_string::from_bit_value(v, len);
            if (!(canonicalize(y, rel) == canon))
                continue;
            const table_entry* e = find_entry(output_key::of(y), t);
            if (!e)
                continue;
            if (!found || e->min_program_bits < best)
                best = e->min_program_bits;
            found = true;
        }
        REQUIRE(found);
        return best;
    };

    std::mt19937_64 rng(9);
    for (int i = 0; i < 60; ++i) {
        std::uint32_t la = 1 + rng() % 5, lb = 1 + rng() % 5;
        symbol_string a = bits(testsup::random_bit_text(rng, la));
        symbol_string b = bits(testsup::random_bit_text(rng, lb));
        symbol_string ab = bits(a.to_bit_text() + b.to_bit_text());
        relation_spec rels[] = {relation_spec::multiset(), relation_spec::parity(),
                                relation_spec::prefix_cylinder(1)};
        for (const relation_spec& rel : rels) {
            exact_conditional_result c = exact_conditional(a, b, rel, t);
            std::int64_t expected = static_cast<std::int64_t>(class_min(ab, rel)) -
                                    static_cast<std::int64_t>(class_min(b, rel));
            REQUIRE(c.raw == expected);
            REQUIRE(c.clamped ==
                    static_cast<std::uint64_t>(expected < 0 ? 0 : expected));
            REQUIRE(exact_max_distance(a, b, rel, t) ==
                    exact_max_distance(b, a, rel, t));
        }
    }
}

TEST_CASE("entropy report reproduces the counting-vs-coding gap") {
    entropy_report rep =
        entropy_relation_report(relation_spec::multiset(), 8, table_at(18));
    REQUIRE(rep.classes.size() == 9);
    REQUIRE(rep.overall.count == 256);

    const class_entropy* four_ones = nullptr;
    for (const auto& c : rep.classes)
        if (c.canonical == bits("00001111"))
            four_ones = &c;
    REQUIRE(four_ones != nullptr);
    REQUIRE(four_ones->cardinality == 70);
    REQUIRE(four_ones->exact);
    REQUIRE_FALSE(four_ones->partial);
    REQUIRE(four_ones->s_bits == 14);
    REQUIRE(four_ones->members.size() == 70);

    const member_entropy* alternating = nullptr;
    for (const auto& m : four_ones->members)
        if (m.x == output_key::of(bits("01101001")))
            alternating = &m;
    REQUIRE(alternating != nullptr);
    REQUIRE(alternating->c_bits == 18);
    REQUIRE(alternating->delta ==
            Catch::Approx(std::log2(70.0) - 4.0).epsilon(0).margin(1e-6));
    REQUIRE(alternating->sigma ==
            Catch::Approx(std::log2(70.0) + 14.0).epsilon(0).margin(1e-6));

    for (const auto& c : rep.classes)
        for (const auto& m : c.members) {
            REQUIRE(m.delta == Catch::Approx(m.sigma_vs_k).epsilon(0).margin(1e-12));
            REQUIRE(m.sigma_vs_k_shifted ==
                    Catch::Approx(m.sigma_vs_k + 8.0).epsilon(0).margin(1e-12));
        }

    entropy_report id =
        entropy_relation_report(relation_spec::identity(), 8, table_at(18));
    REQUIRE(id.overall.count == 256);
    REQUIRE(id.overall.min == 0.0);
    REQUIRE(id.overall.max == 0.0);
}

TEST_CASE("table text round trips and rejects tampering") {
    const enumeration_table& t = table_at(12);
    std::string text = table_to_text(t);
    enumeration_table back = table_from_text(text);
    REQUIRE(back.max_program_bits == 12);
    REQUIRE(back.max_output == t.max_output);
    REQUIRE(back.entries.size() == t.entries.size());
    for (const auto& [key, e] : t.entries) {
        const table_entry* b = find_entry(key, back);
        REQUIRE(b != nullptr);
        REQUIRE(b->min_program_bits == e.min_program_bits);
        REQUIRE(b->mass == e.mass);
    }
    REQUIRE(back.total_mass == t.total_mass);
    REQUIRE(table_to_text(back) == text);

    testsup::temp_dir dir;
    std::string path = dir.file("table.txt");
    write_table(path, t);
    REQUIRE(testsup::read_file(path) == text);
    REQUIRE(read_table(path).total_mass == t.total_mass);

    auto kind_of = [](const std::string& doc) {
        return testsup::thrown_kind([&] { table_from_text(doc); });
    };
    REQUIRE(kind_of("") == mcx::error_kind::data);
    REQUIRE(kind_of("junk\n") == mcx::error_kind::data);

    std::size_t first_line = text.find('\n') + 1;
    std::size_t second_line = text.find('\n', first_line) + 1;
    std::string duplicated =
        text + text.substr(first_line, second_line - first_line);
    REQUIRE_THROWS_WITH(table_from_text(duplicated),
                        Catch::Matchers::ContainsSubstring("duplicate"));

    std::string wrong_machine = text;
    wrong_machine.replace(wrong_machine.find("machine=pm1"), 11, "machine=pm2");
    REQUIRE_THROWS_WITH(table_from_text(wrong_machine),
                        Catch::Matchers::ContainsSubstring("machine"));

    std::string header = text.substr(0, first_line);
    REQUIRE(kind_of(header + "zz 8 4 1 4\n") == mcx::error_kind::data);
    REQUIRE_THROWS_WITH(table_from_text(header + "01 1 4 1 4\n"),
                        Catch::Matchers::ContainsSubstring("pad"));
    REQUIRE(kind_of(header + "00 1 4 1\n") == mcx::error_kind::data);
}

TEST_CASE("the oracle-backed compressor returns exact complexities") {
    auto t = std::make_shared<enumeration_table>(table_at(16));
    mcx::compressor comp = make_oracle_compressor(t);
    REQUIRE(comp.code_length({}) == 0);
    REQUIRE(comp.code_length({0x00}) == 8);     // the 8-zeros string
    REQUIRE(comp.code_length({0xFF}) == 8);
    REQUIRE(testsup::thrown_kind([&] { comp.code_length({0x69}); }) ==
            mcx::error_kind::data); // needs 18 program bits, horizon is 16
}

TEST_CASE("the bundled invariant suite passes on a clean table") {
    verify_outcome out = oracle_verify(
        12, 6,
        {relation_spec::identity(), relation_spec::multiset(),
         relation_spec::parity(), relation_spec::prefix_cylinder(3)});
    REQUIRE(out.all_ok());
    REQUIRE(out.failures.empty());
    REQUIRE(out.halting_programs == cumulative_count(12));
}
