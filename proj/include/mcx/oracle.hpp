#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "core.hpp"
#include "quantizers.hpp"
#include "version.hpp"

namespace mcx::oracle {

// ============================================================================
// exact dyadic arithmetic for probability masses
// ============================================================================

// value = num / 2^exp, kept normalized (num odd, or num = 0 with exp = 0).
struct dyadic {
    std::uint64_t num = 0;
    std::uint32_t exp = 0;

    static dyadic zero() { return {}; }

    static dyadic one() { return {1, 0}; }

    static dyadic pow2_neg(std::uint32_t e) { return {1, e}; }

    void normalize() {
        if (num == 0) {
            exp = 0;
            return;
        }
        while ((num & 1u) == 0 && exp > 0) {
            num >>= 1;
            --exp;
        }
    }

    double to_double() const {
        return std::ldexp(static_cast<double>(num), -static_cast<int>(exp));
    }

    friend dyadic operator+(dyadic a, dyadic b) {
        if (a.num == 0)
            return b;
        if (b.num == 0)
            return a;
        std::uint32_t e = std::max(a.exp, b.exp);
        std::uint32_t sa = e - a.exp, sb = e - b.exp;
        if (sa >= 64 || sb >= 64 || a.num > (~0ull >> sa) || b.num > (~0ull >> sb))
            fail_data("dyadic overflow");
        std::uint64_t na = a.num << sa, nb = b.num << sb;
        if (na + nb < na)
            fail_data("dyadic overflow");
        dyadic r{na + nb, e};
        r.normalize();
        return r;
    }

    dyadic& operator+=(const dyadic& b) { return *this = *this + b; }

    friend bool operator==(const dyadic& a, const dyadic& b) {
        return a.num == b.num && a.exp == b.exp;
    }

    friend bool operator<(const dyadic& a, const dyadic& b) {
        if (a.num == 0)
            return b.num != 0;
        if (b.num == 0)
            return false;
        std::uint32_t e = std::max(a.exp, b.exp);
        std::uint32_t sa = e - a.exp, sb = e - b.exp;
        if (sa >= 64 || sb >= 64 || a.num > (~0ull >> sa) || b.num > (~0ull >> sb))
            fail_data("dyadic overflow");
        return (a.num << sa) < (b.num << sb);
    }

    friend bool operator<=(const dyadic& a, const dyadic& b) {
        return a == b || a < b;
    }
};

// ============================================================================
// the toy self-delimiting machine
// ============================================================================
//
// Instruction stream, two-bit opcodes:
//   00        emit 0
//   01        emit 1
//   10 nnn b  emit b repeated n+2 times (n is 3 bits, MSB first)
//   11        halt
// A program halts iff parsing consumes exactly all bits and ends on halt.

enum class parse_status { halting, truncated, overrun };

struct packed_run_result {
    parse_status status = parse_status::truncated;
    bool overlong = false; // trailing bits after halt
    std::uint64_t out = 0;
    std::uint32_t out_len = 0;
};

// Program packed in a uint64, first bit at the most significant position of
// the low `plen` bits. Requires max_output <= 64 so the output packs too.
inline packed_run_result run_bits_packed(std::uint64_t prog, std::uint32_t plen,
                                         std::uint32_t max_output) noexcept {
    packed_run_result r;
    std::uint32_t pos = 0;
    while (true) {
        if (pos + 2 > plen)
            return r; // truncated
        std::uint32_t op =
            static_cast<std::uint32_t>((prog >> (plen - pos - 2)) & 3u);
        pos += 2;
        if (op == 3) {
            if (pos != plen) {
                r.overlong = true;
                return r; // truncated-class: trailing bits after halt
            }
            r.status = parse_status::halting;
            return r;
        }
        std::uint32_t count, bit;
        if (op == 2) {
            if (pos + 4 > plen)
                return r;
            std::uint32_t operand =
                static_cast<std::uint32_t>((prog >> (plen - pos - 4)) & 0xFu);
            pos += 4;
            count = (operand >> 1) + 2;
            bit = operand & 1u;
        } else {
            count = 1;
            bit = op;
        }
        if (r.out_len + count > max_output) {
            r.status = parse_status::overrun;
            return r;
        }
        r.out <<= count;
        if (bit)
            r.out |= (count == 64 ? ~0ull : (1ull << count) - 1);
        r.out_len += count;
    }
}

struct run_outcome {
    parse_status status = parse_status::truncated;
    bool overlong = false;
    symbol_string output; // valid iff status == halting
};

// General form for arbitrary-length programs and outputs.
inline run_outcome run_program(const symbol_string& program,
                               std::uint64_t max_output) {
    run_outcome r;
    const std::uint64_t plen = program.bit_length();
    std::uint64_t pos = 0;
    std::string out;
    while (true) {
        if (pos + 2 > plen)
            return r;
        std::uint32_t op = (program.bit(pos) ? 2u : 0u) |
                           (program.bit(pos + 1) ? 1u : 0u);
        pos += 2;
        if (op == 3) {
            if (pos != plen) {
                r.overlong = true;
                return r;
            }
            r.status = parse_status::halting;
            r.output = symbol_string::from_bit_text(out);
            return r;
        }
        std::uint32_t count, bit;
        if (op == 2) {
            if (pos + 4 > plen)
                return r;
            std::uint32_t n = (program.bit(pos) ? 4u : 0u) |
                              (program.bit(pos + 1) ? 2u : 0u) |
                              (program.bit(pos + 2) ? 1u : 0u);
            bit = program.bit(pos + 3) ? 1u : 0u;
            pos += 4;
            count = n + 2;
        } else {
            count = 1;
            bit = op;
        }
        if (out.size() + count > max_output) {
            r.status = parse_status::overrun;
            return r;
        }
        out.append(count, bit ? '1' : '0');
    }
}

struct toy_program {
    symbol_string bits;
    parse_status status;
    bool overlong;
};

inline toy_program classify_program(const symbol_string& bits,
                                    std::uint64_t max_output) {
    run_outcome r = run_program(bits, max_output);
    return {bits, r.status, r.overlong};
}

// ============================================================================
// enumeration
// ============================================================================

struct output_key {
    std::uint32_t len = 0;
    std::uint64_t bits = 0; // first bit at position len-1

    static output_key of(const symbol_string& s) {
        if (s.bit_length() > 64)
            fail_data("output key limited to 64 bits");
        std::uint64_t v = 0;
        for (std::uint64_t i = 0; i < s.bit_length(); ++i)
            v = (v << 1) | (s.bit(i) ? 1u : 0u);
        return {static_cast<std::uint32_t>(s.bit_length()), v};
    }

    symbol_string to_symbol_string() const {
        return symbol_string::from_bit_value(bits, len);
    }

    friend auto operator<=>(const output_key&, const output_key&) = default;
};

struct table_entry {
    std::uint32_t min_program_bits = 0;
    dyadic mass;
};

struct enumeration_table {
    std::uint32_t max_program_bits = 0; // L
    std::uint32_t max_output = 0;
    std::map<output_key, table_entry> entries;
    dyadic total_mass;
};

namespace detail {

struct instruction {
    std::uint32_t bits;
    std::uint32_t nbits;
    std::uint32_t emit_count;
    std::uint32_t emit_bit;
    bool is_halt;
};

inline const std::vector<instruction>& instruction_set() {
    static const std::vector<instruction> set = [] {
        std::vector<instruction> v;
        v.push_back({0b11u, 2, 0, 0, true});
        v.push_back({0b00u, 2, 1, 0, false});
        v.push_back({0b01u, 2, 1, 1, false});
        for (std::uint32_t n = 0; n < 8; ++n)
            for (std::uint32_t b = 0; b < 2; ++b)
                v.push_back({(0b10u << 4) | (n << 1) | b, 6, n + 2, b, false});
        return v;
    }();
    return set;
}

// Depth-first walk of every halting program of <= L bits whose first
// instruction is `first`; visit(prog, plen, out, out_len).
template <class Visit>
void walk_from(const instruction& first, std::uint32_t L, std::uint32_t max_output,
               Visit&& visit) {
    struct frame {
        std::uint32_t used;
        std::uint64_t prog;
        std::uint64_t out;
        std::uint32_t out_len;
    };
    const auto& instrs = instruction_set();
    auto step = [&](const frame& f, const instruction& in,
                    frame& next) -> bool {
        if (f.used + in.nbits + (in.is_halt ? 0u : 2u) > L)
            return false;
        if (!in.is_halt && f.out_len + in.emit_count > max_output)
            return false;
        next.used = f.used + in.nbits;
        next.prog = (f.prog << in.nbits) | in.bits;
        next.out = f.out;
        next.out_len = f.out_len;
        if (in.emit_count) {
            next.out <<= in.emit_count;
            if (in.emit_bit)
                next.out |= (1ull << in.emit_count) - 1;
            next.out_len += in.emit_count;
        }
        return true;
    };
    auto dfs = [&](const frame& f, auto&& self) -> void {
        for (const instruction& in : instrs) {
            frame next;
            if (!step(f, in, next))
                continue;
            if (in.is_halt)
                visit(next.prog, next.used, next.out, next.out_len);
            else
                self(next, self);
        }
    };
    frame root{0, 0, 0, 0};
    frame start;
    if (!step(root, first, start))
        return;
    if (first.is_halt)
        visit(start.prog, start.used, start.out, start.out_len);
    else
        dfs(start, dfs);
}

inline void check_enumeration_args(std::uint32_t L, std::uint32_t max_output) {
    if (L < 2 || L > 30)
        fail_usage("enumeration requires 2 <= L <= 30");
    if (max_output > 64)
        fail_usage("enumeration requires max_output <= 64");
}

} // namespace detail

// Exhaustive table of every halting program of <= L bits. The program space
// is partitioned by first instruction; partitions enumerate independently
// and merge in fixed order (min and mass merges commute, so the result is
// identical to a single sweep).
inline enumeration_table enumerate_programs(std::uint32_t L,
                                            std::uint32_t max_output = 64) {
    detail::check_enumeration_args(L, max_output);
    using partial = std::map<output_key, table_entry>;
    const auto& instrs = detail::instruction_set();

    std::vector<std::future<partial>> parts;
    for (const auto& first : instrs) {
        parts.push_back(std::async(std::launch::async, [&, first] {
            partial p;
            detail::walk_from(first, L, max_output,
                              [&](std::uint64_t, std::uint32_t plen,
                                  std::uint64_t out, std::uint32_t out_len) {
                                  output_key key{out_len, out};
                                  auto [it, fresh] = p.try_emplace(
                                      key, table_entry{plen, dyadic::pow2_neg(plen)});
                                  if (!fresh) {
                                      it->second.min_program_bits =
                                          std::min(it->second.min_program_bits, plen);
                                      it->second.mass += dyadic::pow2_neg(plen);
                                  }
                              });
            return p;
        }));
    }

    enumeration_table t;
    t.max_program_bits = L;
    t.max_output = max_output;
    for (auto& f : parts) {
        partial p = f.get();
        for (const auto& [key, entry] : p) {
            auto [it, fresh] = t.entries.try_emplace(key, entry);
            if (!fresh) {
                it->second.min_program_bits =
                    std::min(it->second.min_program_bits, entry.min_program_bits);
                it->second.mass += entry.mass;
            }
        }
    }
    for (const auto& [key, entry] : t.entries)
        t.total_mass += entry.mass;
    return t;
}

// Independent route used by verification: visit every raw bit string of
// length <= L through the general interpreter rather than walking the
// instruction grammar. Exponential in L, so tightly capped.
inline enumeration_table enumerate_programs_by_scan(std::uint32_t L,
                                                    std::uint32_t max_output = 64) {
    detail::check_enumeration_args(L, max_output);
    if (L > 20)
        fail_usage("raw scan limited to L <= 20");
    enumeration_table t;
    t.max_program_bits = L;
    t.max_output = max_output;
    for (std::uint32_t len = 2; len <= L; ++len) {
        for (std::uint64_t v = 0; v < (1ull << len); ++v) {
            packed_run_result r = run_bits_packed(v, len, max_output);
            if (r.status != parse_status::halting)
                continue;
            output_key key{r.out_len, r.out};
            auto [it, fresh] =
                t.entries.try_emplace(key, table_entry{len, dyadic::pow2_neg(len)});
            if (!fresh) {
                it->second.min_program_bits =
                    std::min(it->second.min_program_bits, len);
                it->second.mass += dyadic::pow2_neg(len);
            }
        }
    }
    for (const auto& [key, entry] : t.entries)
        t.total_mass += entry.mass;
    return t;
}

struct program_record {
    std::uint64_t prog;
    std::uint32_t prog_len;
    output_key out;
};

inline std::vector<program_record> list_halting_programs(std::uint32_t L,
                                                         std::uint32_t max_output = 64) {
    detail::check_enumeration_args(L, max_output);
    if (L > 24)
        fail_usage("program listing limited to L <= 24");
    std::vector<program_record> out;
    for (const auto& first : detail::instruction_set())
        detail::walk_from(first, L, max_output,
                          [&](std::uint64_t prog, std::uint32_t plen,
                              std::uint64_t o, std::uint32_t olen) {
                              out.push_back({prog, plen, {olen, o}});
                          });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::pair(a.prog_len, a.prog) < std::pair(b.prog_len, b.prog);
    });
    return out;
}

// Exhaustive prefix-freeness check over a halting-program listing.
inline bool verify_prefix_free(const std::vector<program_record>& programs) {
    std::unordered_set<std::uint64_t> seen; // (len << 58) | bits
    for (const auto& p : programs)
        seen.insert((static_cast<std::uint64_t>(p.prog_len) << 58) | p.prog);
    for (const auto& p : programs)
        for (std::uint32_t l = 2; l < p.prog_len; ++l) {
            std::uint64_t prefix = p.prog >> (p.prog_len - l);
            if (seen.count((static_cast<std::uint64_t>(l) << 58) | prefix))
                return false;
        }
    return true;
}

// ============================================================================
// exact queries over a table
// ============================================================================

inline const table_entry* find_entry(const output_key& x,
                                     const enumeration_table& t) {
    auto it = t.entries.find(x);
    return it == t.entries.end() ? nullptr : &it->second;
}

inline std::uint32_t exact_complexity(const output_key& x,
                                      const enumeration_table& t) {
    const table_entry* e = find_entry(x, t);
    if (!e)
        fail_data("output not reached at this L (unknown, not infinite)");
    return e->min_program_bits;
}

inline std::uint32_t exact_complexity(const symbol_string& x,
                                      const enumeration_table& t) {
    return exact_complexity(output_key::of(x), t);
}

struct probability_result {
    dyadic mass;                 // exact truncated U(X)
    std::uint32_t min_bits;      // C(X)
    dyadic first_order;          // 2^-C(X)
    double ratio;                // mass / first_order, always >= 1
};

inline probability_result universal_probability(const output_key& x,
                                                const enumeration_table& t) {
    const table_entry* e = find_entry(x, t);
    if (!e)
        fail_data("output not reached at this L (unknown, not infinite)");
    probability_result r;
    r.mass = e->mass;
    r.min_bits = e->min_program_bits;
    r.first_order = dyadic::pow2_neg(e->min_program_bits);
    r.ratio = r.mass.to_double() / r.first_order.to_double();
    return r;
}

inline probability_result universal_probability(const symbol_string& x,
                                                const enumeration_table& t) {
    return universal_probability(output_key::of(x), t);
}

// ============================================================================
// exact macrocomplexity and class probability
// ============================================================================

struct macro_result {
    bool exact = false;          // false: no class member reached, bound only
    std::uint32_t min_bits = 0;  // exact value, or L+1 as a lower bound
    symbol_string witness;       // arg-min member, valid when exact
    std::uint64_t class_size = 0;
    std::uint64_t reached_members = 0;
};

inline macro_result exact_macrocomplexity(const symbol_string& x,
                                          const relation_spec& relation,
                                          std::uint32_t universe_bits,
                                          const enumeration_table& t) {
    std::vector<symbol_string> members = enumerate_class(x, universe_bits, relation);
    macro_result r;
    r.class_size = members.size();
    r.min_bits = t.max_program_bits + 1; // lower bound when nothing is reached
    for (const symbol_string& y : members) {
        const table_entry* e = find_entry(output_key::of(y), t);
        if (!e)
            continue;
        ++r.reached_members;
        if (!r.exact || e->min_program_bits < r.min_bits)
            r.min_bits = e->min_program_bits;
        r.exact = true;
    }
    if (r.exact) {
        // deterministic arg-min witness: first minimal member in
        // enumeration order (ascending as a binary number)
        for (const symbol_string& y : members) {
            const table_entry* e = find_entry(output_key::of(y), t);
            if (e && e->min_program_bits == r.min_bits) {
                r.witness = y;
                break;
            }
        }
    }
    return r;
}

struct class_probability_result {
    dyadic mass;
    std::uint64_t class_size = 0;
    std::uint64_t reached_members = 0;
};

namespace detail {

// Direct sum over halting programs whose output lies in the class: the
// membership test goes through the canonicalizer, not the class enumerator,
// so the two routes are independent. Class members are the strings of the
// universe length only (the canonical form of a different-length string can
// coincide for parity, which collapses lengths).
inline dyadic class_probability_by_walk(const symbol_string& x,
                                        const relation_spec& relation,
                                        std::uint32_t universe_bits,
                                        const enumeration_table& t) {
    symbol_string canon = canonicalize(x, relation);
    dyadic sum;
    for (const auto& [key, entry] : t.entries) {
        if (key.len != universe_bits)
            continue;
        symbol_string y = key.to_symbol_string();
        symbol_string cy = canonicalize(y, relation);
        if (cy == canon)
            sum += entry.mass;
    }
    return sum;
}

} // namespace detail

inline class_probability_result
class_universal_probability(const symbol_string& x, const relation_spec& relation,
                            std::uint32_t universe_bits,
                            const enumeration_table& t) {
    std::vector<symbol_string> members = enumerate_class(x, universe_bits, relation);
    class_probability_result r;
    r.class_size = members.size();
    for (const symbol_string& y : members) {
        const table_entry* e = find_entry(output_key::of(y), t);
        if (!e)
            continue;
        ++r.reached_members;
        r.mass += e->mass;
    }
    dyadic by_walk = detail::class_probability_by_walk(x, relation, universe_bits, t);
    if (!(by_walk == r.mass))
        fail_data("class probability sum identity violated");
    return r;
}

// ============================================================================
// conditional and distance at the exact level
// ============================================================================

namespace detail {

inline symbol_string concat_bits(const symbol_string& a, const symbol_string& b) {
    return symbol_string::from_bit_text(a.to_bit_text() + b.to_bit_text());
}

} // namespace detail

struct exact_conditional_result {
    std::int64_t raw;
    std::uint64_t clamped;
};

// S((A|B)/P) = S(AB/P) - S(B/P) with AB the bit concatenation; classes are
// taken in the universes |AB| and |B|. Errors when either class is unreached.
inline exact_conditional_result exact_conditional(const symbol_string& a,
                                                  const symbol_string& b,
                                                  const relation_spec& relation,
                                                  const enumeration_table& t) {
    symbol_string ab = detail::concat_bits(a, b);
    macro_result sab = exact_macrocomplexity(
        ab, relation, static_cast<std::uint32_t>(ab.bit_length()), t);
    macro_result sb = exact_macrocomplexity(
        b, relation, static_cast<std::uint32_t>(b.bit_length()), t);
    if (!sab.exact || !sb.exact)
        fail_data("conditional undefined: class unreached at this L");
    std::int64_t raw = static_cast<std::int64_t>(sab.min_bits) -
                       static_cast<std::int64_t>(sb.min_bits);
    return {raw, raw < 0 ? 0ull : static_cast<std::uint64_t>(raw)};
}

inline std::uint64_t exact_max_distance(const symbol_string& a,
                                        const symbol_string& b,
                                        const relation_spec& relation,
                                        const enumeration_table& t) {
    return std::max(exact_conditional(a, b, relation, t).clamped,
                    exact_conditional(b, a, relation, t).clamped);
}

// ============================================================================
// entropy relation report
// ============================================================================

struct member_entropy {
    output_key x;
    std::uint32_t c_bits = 0;
    double delta = 0.0;            // log2|class| - (C - S)
    bool typical = false;          // U(X|class) within factor tau of the mean
    double sigma = 0.0;            // log2|class| + S
    double sigma_vs_k = 0.0;       // sigma - C
    double sigma_vs_k_shifted = 0.0; // sigma - (C - |X|)
};

struct class_entropy {
    symbol_string canonical;
    std::uint64_t cardinality = 0;
    double log2_cardinality = 0.0;
    double log2_cardinality_shifted = 0.0; // minus universe bits
    bool partial = false;  // some member unreached at this L
    bool exact = false;    // class minimum is exact
    std::uint32_t s_bits = 0;
    dyadic class_mass;
    std::vector<member_entropy> members; // reached members only
    std::uint64_t unreached_members = 0;
};

struct residual_stats {
    std::uint64_t count = 0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

struct entropy_report {
    relation_spec relation;
    std::uint32_t universe_bits = 0;
    std::uint32_t L = 0;
    double tau = 4.0;
    std::vector<class_entropy> classes;
    residual_stats overall;
    residual_stats typical_only;
};

namespace detail {

inline residual_stats stats_of(std::vector<double> values) {
    residual_stats s;
    s.count = values.size();
    if (values.empty())
        return s;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    std::size_t n = values.size();
    s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    return s;
}

} // namespace detail

inline entropy_report entropy_relation_report(const relation_spec& relation,
                                              std::uint32_t universe_bits,
                                              const enumeration_table& t,
                                              double tau = 4.0) {
    if (!relation.enumerable())
        fail_usage("entropy report requires an enumerable relation");
    if (universe_bits > 16)
        fail_usage("entropy report limited to universes of 16 bits");
    if (tau < 1.0)
        fail_usage("typicality factor tau must be >= 1");

    entropy_report rep;
    rep.relation = relation;
    rep.universe_bits = universe_bits;
    rep.L = t.max_program_bits;
    rep.tau = tau;

    // group the universe by canonical form
    std::map<output_key, std::vector<output_key>> classes;
    for (std::uint64_t v = 0; v < (1ull << universe_bits); ++v) {
        symbol_string x = symbol_string::from_bit_value(v, universe_bits);
        symbol_string canon = canonicalize(x, relation);
        classes[output_key::of(canon)].push_back({universe_bits, v});
    }

    std::vector<double> all_deltas, typical_deltas;
    for (const auto& [canon_key, members] : classes) {
        class_entropy ce;
        ce.canonical = canon_key.to_symbol_string();
        ce.cardinality = members.size();
        ce.log2_cardinality = std::log2(static_cast<double>(ce.cardinality));
        ce.log2_cardinality_shifted =
            ce.log2_cardinality - static_cast<double>(universe_bits);

        std::uint32_t min_bits = t.max_program_bits + 1;
        for (const output_key& m : members) {
            const table_entry* e = find_entry(m, t);
            if (!e) {
                ce.partial = true;
                ++ce.unreached_members;
                continue;
            }
            ce.exact = true;
            min_bits = std::min(min_bits, e->min_program_bits);
            ce.class_mass += e->mass;
        }
        if (ce.exact)
            ce.s_bits = min_bits;

        if (ce.exact) {
            const double mean_mass =
                ce.class_mass.to_double() / static_cast<double>(ce.cardinality);
            for (const output_key& m : members) {
                const table_entry* e = find_entry(m, t);
                if (!e)
                    continue;
                member_entropy me;
                me.x = m;
                me.c_bits = e->min_program_bits;
                me.delta = ce.log2_cardinality -
                           (static_cast<double>(me.c_bits) -
                            static_cast<double>(ce.s_bits));
                double u = e->mass.to_double();
                me.typical = u >= mean_mass / tau && u <= mean_mass * tau;
                me.sigma = ce.log2_cardinality + static_cast<double>(ce.s_bits);
                me.sigma_vs_k = me.sigma - static_cast<double>(me.c_bits);
                me.sigma_vs_k_shifted =
                    me.sigma - (static_cast<double>(me.c_bits) -
                                static_cast<double>(universe_bits));
                all_deltas.push_back(me.delta);
                if (me.typical)
                    typical_deltas.push_back(me.delta);
                ce.members.push_back(me);
            }
        }
        rep.classes.push_back(std::move(ce));
    }
    rep.overall = detail::stats_of(std::move(all_deltas));
    rep.typical_only = detail::stats_of(std::move(typical_deltas));
    return rep;
}

// ============================================================================
// table text format
// ============================================================================
//
//   # machine=pm1 tool=<v> L=<n> max_output=<m>
//   <output_hex> <bitlen> <min_bits> <mass_num> <mass_exp>
//
// output_hex packs the output MSB-first ("-" for the empty output); lines
// sort lexicographically; the round trip is bit-exact.

namespace detail {

inline std::string key_to_hex(const output_key& k) {
    if (k.len == 0)
        return "-";
    static const char* digits = "0123456789abcdef";
    std::uint32_t nbytes = (k.len + 7) / 8;
    std::string hex;
    for (std::uint32_t i = 0; i < nbytes; ++i) {
        // left-align the bit string inside its bytes, pad bits zero
        std::uint32_t hi = k.len - std::min(k.len, 8 * i);
        std::uint32_t lo = k.len - std::min(k.len, 8 * (i + 1));
        std::uint64_t byte = ((k.bits >> lo) << (8 - (hi - lo))) & 0xFF;
        hex.push_back(digits[byte >> 4]);
        hex.push_back(digits[byte & 0xF]);
    }
    return hex;
}

inline output_key key_from_hex(const std::string& hex, std::uint32_t bitlen) {
    if (bitlen > 64)
        fail_data("table entry output exceeds 64 bits");
    if (hex == "-") {
        if (bitlen != 0)
            fail_data("table entry '-' requires bitlen 0");
        return {0, 0};
    }
    if (hex.size() != 2 * ((bitlen + 7) / 8))
        fail_data("table entry hex length does not match bitlen");
    std::uint64_t wide = 0;
    for (char c : hex) {
        std::uint32_t d;
        if (c >= '0' && c <= '9')
            d = static_cast<std::uint32_t>(c - '0');
        else if (c >= 'a' && c <= 'f')
            d = static_cast<std::uint32_t>(c - 'a') + 10;
        else
            fail_data("table entry has invalid hex");
        wide = (wide << 4) | d;
    }
    std::uint32_t pad = 8 * ((bitlen + 7) / 8) - bitlen;
    if (pad && (wide & ((1ull << pad) - 1)))
        fail_data("table entry has nonzero pad bits");
    return {bitlen, wide >> pad};
}

} // namespace detail

inline std::string table_to_text(const enumeration_table& t) {
    std::vector<std::string> lines;
    lines.reserve(t.entries.size());
    for (const auto& [key, e] : t.entries) {
        std::ostringstream line;
        line << detail::key_to_hex(key) << ' ' << key.len << ' '
             << e.min_program_bits << ' ' << e.mass.num << ' ' << e.mass.exp;
        lines.push_back(line.str());
    }
    std::sort(lines.begin(), lines.end());
    std::ostringstream out;
    out << "# machine=" << machine_version << " tool=" << tool_version
        << " L=" << t.max_program_bits << " max_output=" << t.max_output << "\n";
    for (const std::string& l : lines)
        out << l << "\n";
    return out.str();
}

inline enumeration_table table_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header) || header.rfind("# machine=", 0) != 0)
        fail_data("table text missing header");
    enumeration_table t;
    try {
        std::istringstream hs(header.substr(1));
        std::string field;
        std::string machine;
        while (hs >> field) {
            auto eq = field.find('=');
            if (eq == std::string::npos)
                continue;
            std::string key = field.substr(0, eq), value = field.substr(eq + 1);
            if (key == "machine")
                machine = value;
            else if (key == "L")
                t.max_program_bits = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "max_output")
                t.max_output = static_cast<std::uint32_t>(std::stoul(value));
        }
        if (machine != machine_version)
            fail_data("table text from a different machine version");
        if (t.max_program_bits == 0)
            fail_data("table text missing L");
    } catch (const error&) {
        throw;
    } catch (const std::exception&) {
        fail_data("malformed table header: " + header);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string hex;
        std::uint32_t bitlen, min_bits;
        std::uint64_t num;
        std::uint32_t exp;
        if (!(ls >> hex >> bitlen >> min_bits >> num >> exp))
            fail_data("malformed table line: " + line);
        output_key key = detail::key_from_hex(hex, bitlen);
        dyadic mass{num, exp};
        mass.normalize();
        if (!t.entries.emplace(key, table_entry{min_bits, mass}).second)
            fail_data("duplicate table line: " + line);
    }
    for (const auto& [key, entry] : t.entries)
        t.total_mass += entry.mass;
    return t;
}

inline void write_table(const std::string& path, const enumeration_table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail_data("cannot open table file for writing: " + path);
    out << table_to_text(t);
    if (!out)
        fail_data("failed writing table file: " + path);
}

inline enumeration_table read_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail_data("cannot open table file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return table_from_text(buf.str());
}

// ============================================================================
// oracle-backed compressor (exact K as the estimator's code length)
// ============================================================================

inline compressor make_oracle_compressor(std::shared_ptr<const enumeration_table> t) {
    return {"oracle:L=" + std::to_string(t->max_program_bits),
            [t](const std::vector<std::uint8_t>& payload) -> std::uint64_t {
                if (payload.empty())
                    return 0; // compressor contract pins code_length(empty)=0
                symbol_string bits = symbol_string::from_packed_bits(
                    payload, 8 * static_cast<std::uint64_t>(payload.size()));
                return exact_complexity(bits, *t);
            }};
}

// ============================================================================
// invariant verification bundle
// ============================================================================

struct verify_outcome {
    std::uint32_t L = 0;
    std::uint32_t universe_bits = 0;
    bool prefix_free_ok = false;
    bool kraft_ok = false;
    bool s_le_c_ok = false;
    bool sum_identity_ok = false;
    bool refinement_ok = false;
    std::uint64_t halting_programs = 0;
    std::vector<std::string> failures;

    bool all_ok() const {
        return prefix_free_ok && kraft_ok && s_le_c_ok && sum_identity_ok &&
               refinement_ok;
    }
};

// Exact invariant suite over one universe: prefix-freeness, Kraft,
// S(X/P) <= C(X) per relation, the class-probability sum identity, and
// refinement monotonicity between multiset and parity partitions.
inline verify_outcome oracle_verify(const enumeration_table& t,
                                    std::uint32_t universe_bits,
                                    const std::vector<relation_spec>& relations) {
    if (universe_bits > 12)
        fail_usage("oracle verify limited to universes of 12 bits");
    verify_outcome out;
    out.L = t.max_program_bits;
    out.universe_bits = universe_bits;

    std::vector<program_record> programs =
        list_halting_programs(t.max_program_bits, t.max_output);
    out.halting_programs = programs.size();
    out.prefix_free_ok = verify_prefix_free(programs);
    if (!out.prefix_free_ok)
        out.failures.push_back("prefix-freeness violated");

    out.kraft_ok = t.total_mass <= dyadic::one();
    if (!out.kraft_ok)
        out.failures.push_back("Kraft inequality violated");

    out.s_le_c_ok = true;
    out.sum_identity_ok = true;
    for (const relation_spec& rel : relations) {
        if (!rel.enumerable())
            fail_usage("oracle verify requires enumerable relations");
        for (std::uint64_t v = 0; v < (1ull << universe_bits); ++v) {
            symbol_string x = symbol_string::from_bit_value(v, universe_bits);
            macro_result m = exact_macrocomplexity(x, rel, universe_bits, t);
            const table_entry* e = find_entry(output_key::of(x), t);
            if (e) {
                // a reached X forces an exact class minimum
                if (!m.exact || m.min_bits > e->min_program_bits) {
                    out.s_le_c_ok = false;
                    out.failures.push_back("S <= C violated for " +
                                           x.to_bit_text() + " under " +
                                           rel.to_text());
                }
            }
            // unreached X: C > L >= any exact S, nothing to falsify
            try {
                class_universal_probability(x, rel, universe_bits, t);
            } catch (const error&) {
                out.sum_identity_ok = false;
                out.failures.push_back("sum identity violated for " +
                                       x.to_bit_text() + " under " +
                                       rel.to_text());
            }
        }
    }

    // multiset refines parity: parity classes are unions of multiset classes,
    // so the parity minimum can only be lower.
    out.refinement_ok = true;
    for (std::uint64_t v = 0; v < (1ull << universe_bits); ++v) {
        symbol_string x = symbol_string::from_bit_value(v, universe_bits);
        macro_result fine =
            exact_macrocomplexity(x, relation_spec::multiset(), universe_bits, t);
        macro_result coarse =
            exact_macrocomplexity(x, relation_spec::parity(), universe_bits, t);
        if (fine.exact && coarse.exact && coarse.min_bits > fine.min_bits) {
            out.refinement_ok = false;
            out.failures.push_back("refinement monotonicity violated for " +
                                   x.to_bit_text());
        }
        if (fine.exact && !coarse.exact) {
            out.refinement_ok = false;
            out.failures.push_back("coarse class unreached but fine reached: " +
                                   x.to_bit_text());
        }
    }
    return out;
}

inline verify_outcome oracle_verify(std::uint32_t L, std::uint32_t universe_bits,
                                    const std::vector<relation_spec>& relations,
                                    std::uint32_t max_output = 64) {
    return oracle_verify(enumerate_programs(L, max_output), universe_bits,
                         relations);
}

} // namespace mcx::oracle
