#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "compressors.hpp"
#include "core.hpp"
#include "quantizers.hpp"

namespace mcx {

// ============================================================================
// estimator configuration
// ============================================================================

enum class symmetrize_mode {
    max_of_conditionals, // the max-distance numerator
    sum_of_conditionals, // the additive alternative
};

struct estimator_config {
    relation_spec relation;
    compressor comp = make_lz78_compressor();
    bool clamp_negative_conditionals = true;
    symmetrize_mode symmetrize = symmetrize_mode::max_of_conditionals;
};

// Distance flavors exposed on the CLI: raw bits, or normalized by the larger
// macrocomplexity (with either numerator).
enum class distance_mode { max_bits, normalized, normalized_sum };

inline distance_mode parse_distance_mode(std::string_view text) {
    if (text == "max")
        return distance_mode::max_bits;
    if (text == "ncd")
        return distance_mode::normalized;
    if (text == "sum")
        return distance_mode::normalized_sum;
    fail_usage("unknown distance mode '" + std::string(text) + "'");
}

// ============================================================================
// point estimates
// ============================================================================

inline double k_hat(const symbol_string& x, const estimator_config& cfg) {
    return static_cast<double>(cfg.comp.code_length(x.payload()));
}

// The canonical representative's compressed length stands in for the class
// minimum; the quantizer is the search heuristic.
inline double s_hat(const symbol_string& x, const estimator_config& cfg) {
    return k_hat(canonicalize(x, cfg.relation), cfg);
}

// A canonicalized input with its macrocomplexity estimate, cached so corpus
// sweeps do not recompress the same exemplar per pair.
struct prepared_input {
    symbol_string canonical;
    double s_bits = 0.0;
};

inline prepared_input prepare(const symbol_string& x, const estimator_config& cfg) {
    prepared_input p;
    p.canonical = canonicalize(x, cfg.relation);
    p.s_bits = k_hat(p.canonical, cfg);
    return p;
}

struct conditional_result {
    double value = 0.0; // clamped when the config says so
    double raw = 0.0;   // always the unclamped difference
};

inline conditional_result conditional_macrocomplexity(const prepared_input& a,
                                                      const prepared_input& b,
                                                      const estimator_config& cfg) {
    double joint = k_hat(join_for_conditional(a.canonical, b.canonical), cfg);
    conditional_result r;
    r.raw = joint - b.s_bits;
    r.value = cfg.clamp_negative_conditionals ? std::max(0.0, r.raw) : r.raw;
    return r;
}

inline conditional_result conditional_macrocomplexity(const symbol_string& a,
                                                      const symbol_string& b,
                                                      const estimator_config& cfg) {
    return conditional_macrocomplexity(prepare(a, cfg), prepare(b, cfg), cfg);
}

inline double max_distance(const prepared_input& a, const prepared_input& b,
                           const estimator_config& cfg) {
    return std::max(conditional_macrocomplexity(a, b, cfg).value,
                    conditional_macrocomplexity(b, a, cfg).value);
}

inline double max_distance(const symbol_string& a, const symbol_string& b,
                           const estimator_config& cfg) {
    return max_distance(prepare(a, cfg), prepare(b, cfg), cfg);
}

inline double normalized_macro_distance(const prepared_input& a,
                                        const prepared_input& b,
                                        const estimator_config& cfg) {
    double denom = std::max(a.s_bits, b.s_bits);
    if (denom <= 0.0)
        fail_data("normalized distance undefined: both macrocomplexities are zero");
    double ab = conditional_macrocomplexity(a, b, cfg).value;
    double ba = conditional_macrocomplexity(b, a, cfg).value;
    double numer = cfg.symmetrize == symmetrize_mode::sum_of_conditionals
                       ? ab + ba
                       : std::max(ab, ba);
    return numer / denom;
}

inline double normalized_macro_distance(const symbol_string& a,
                                        const symbol_string& b,
                                        const estimator_config& cfg) {
    return normalized_macro_distance(prepare(a, cfg), prepare(b, cfg), cfg);
}

inline double pair_distance(const prepared_input& a, const prepared_input& b,
                            const estimator_config& cfg, distance_mode mode) {
    switch (mode) {
    case distance_mode::max_bits:
        return max_distance(a, b, cfg);
    case distance_mode::normalized: {
        estimator_config c = cfg;
        c.symmetrize = symmetrize_mode::max_of_conditionals;
        return normalized_macro_distance(a, b, c);
    }
    case distance_mode::normalized_sum: {
        estimator_config c = cfg;
        c.symmetrize = symmetrize_mode::sum_of_conditionals;
        return normalized_macro_distance(a, b, c);
    }
    }
    fail_usage("unknown distance mode");
}

// ============================================================================
// Boltzmann entropy / cardinality estimate
// ============================================================================

inline complexity_report boltzmann_estimate(const symbol_string& x,
                                            const estimator_config& cfg) {
    complexity_report rep;
    rep.k_hat_bits = k_hat(x, cfg);
    rep.s_hat_bits = s_hat(x, cfg);
    rep.entropy_estimate_bits = rep.k_hat_bits - rep.s_hat_bits;
    rep.cardinality_estimate = std::exp2(rep.entropy_estimate_bits);
    rep.relation_name = cfg.relation.to_text();
    rep.compressor_name = cfg.comp.name;
    return rep;
}

} // namespace mcx
