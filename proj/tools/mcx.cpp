// mcx: exact and estimated macrostate complexity over a toy prefix machine.
//
// Every subcommand prints a JSON document to stdout (stable key order, so
// reruns are byte-identical apart from the manifest timestamp) and a short
// human summary to stderr; --json keeps stdout only.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcx/classifier.hpp"
#include "mcx/compressors.hpp"
#include "mcx/core.hpp"
#include "mcx/estimators.hpp"
#include "mcx/io.hpp"
#include "mcx/oracle.hpp"
#include "mcx/quantizers.hpp"
#include "mcx/synth.hpp"
#include "mcx/version.hpp"

using json = nlohmann::json;

namespace {

std::string iso_timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

json base_manifest(const std::string& command) {
    return json{
        {"command", command},
        {"machine", mcx::machine_version},
        {"timestamp", iso_timestamp_utc()},
        {"tool_version", mcx::tool_version},
    };
}

json input_json(const mcx::input_source& src) {
    json j{
        {"bits", src.data.bit_length()},
        {"digest", src.digest},
        {"encoding", mcx::encoding_name(src.data.tag())},
        {"format", mcx::input_format_name(src.format)},
        {"path", src.path},
    };
    if (src.format == mcx::input_format::wav)
        j["sample_rate"] = src.sample_rate;
    return j;
}

json dyadic_json(const mcx::oracle::dyadic& d) {
    return json{{"exp", d.exp}, {"num", d.num}, {"value", d.to_double()}};
}

json stats_json(const mcx::oracle::residual_stats& s) {
    return json{{"count", s.count},
                {"max", s.max},
                {"median", s.median},
                {"min", s.min}};
}

void emit(const json& manifest, const json& result, bool json_only,
          const std::string& human) {
    json doc{{"manifest", manifest}, {"result", result}};
    std::cout << doc.dump(2) << "\n";
    if (!json_only && !human.empty())
        std::cerr << human;
}

mcx::input_format resolve_format(const std::string& text, const std::string& path) {
    return text.empty() ? mcx::infer_input_format(path)
                        : mcx::parse_input_format(text);
}

// Corpus files share one format; infer it from the first file when no
// --format was given.
mcx::input_format corpus_format(const std::string& text, const std::string& dir) {
    if (!text.empty())
        return mcx::parse_input_format(text);
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        mcx::fail_data("corpus directory not found: " + dir);
    std::vector<fs::path> labels;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() &&
            !entry.path().filename().string().starts_with("."))
            labels.push_back(entry.path());
    std::sort(labels.begin(), labels.end());
    for (const fs::path& label : labels) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(label))
            if (entry.is_regular_file() &&
                !entry.path().filename().string().starts_with("."))
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (!files.empty())
            return mcx::infer_input_format(files.front().string());
    }
    return mcx::input_format::raw;
}

void check_rate(const mcx::input_source& src, const mcx::relation_spec& rel) {
    if (rel.kind == mcx::relation_kind::bandlimit &&
        src.format == mcx::input_format::wav &&
        src.sample_rate != rel.sample_rate_hz)
        mcx::fail_data("wav sample_rate=" + std::to_string(src.sample_rate) +
                       " does not match relation rate=" +
                       std::to_string(rel.sample_rate_hz));
}

struct cli_opts {
    std::string input;
    std::string input_b;
    std::string corpus;
    std::string output;
    std::string table;
    std::string relation = "identity";
    std::string compressor = "lz78";
    std::string format;
    std::string distance = "ncd";
    std::vector<std::string> relations;
    bool json_only = false;
    std::uint32_t L = 0;
    std::uint32_t universe = 8;
    std::uint32_t max_output = 64;
    double tau = 4.0;
    std::uint64_t seed = 1;
    std::uint32_t per_class = 20;
};

mcx::estimator_config make_config(const cli_opts& o) {
    mcx::estimator_config cfg;
    cfg.relation = mcx::relation_spec::parse(o.relation);
    cfg.comp = mcx::parse_compressor(o.compressor);
    return cfg;
}

// ----------------------------------------------------------------------------
// estimate
// ----------------------------------------------------------------------------

void run_estimate(const cli_opts& o) {
    mcx::estimator_config cfg = make_config(o);
    mcx::input_source src =
        mcx::load_input(o.input, resolve_format(o.format, o.input));
    check_rate(src, cfg.relation);

    mcx::complexity_report rep = mcx::boltzmann_estimate(src.data, cfg);

    json manifest = base_manifest("estimate");
    manifest["compressor"] = rep.compressor_name;
    manifest["relation"] = rep.relation_name;
    manifest["inputs"] = json::array({input_json(src)});

    json result{
        {"cardinality_estimate",
         std::isfinite(rep.cardinality_estimate) ? json(rep.cardinality_estimate)
                                                 : json("inf")},
        {"compressor", rep.compressor_name},
        {"entropy_estimate_bits", rep.entropy_estimate_bits},
        {"input_id", src.path},
        {"k_hat_bits", rep.k_hat_bits},
        {"relation", rep.relation_name},
        {"s_hat_bits", rep.s_hat_bits},
    };
    emit(manifest, result, o.json_only,
         "k_hat=" + num(rep.k_hat_bits) + " bits  s_hat=" + num(rep.s_hat_bits) +
             " bits  entropy=" + num(rep.entropy_estimate_bits) +
             " bits  cardinality=" + num(rep.cardinality_estimate) +
             "  relation=" + rep.relation_name +
             "  compressor=" + rep.compressor_name + "\n");
}

// ----------------------------------------------------------------------------
// distance
// ----------------------------------------------------------------------------

void run_distance(const cli_opts& o) {
    mcx::estimator_config cfg = make_config(o);
    mcx::distance_mode mode = mcx::parse_distance_mode(o.distance);
    mcx::input_source a =
        mcx::load_input(o.input, resolve_format(o.format, o.input));
    mcx::input_source b =
        mcx::load_input(o.input_b, resolve_format(o.format, o.input_b));
    check_rate(a, cfg.relation);
    check_rate(b, cfg.relation);

    mcx::prepared_input pa = mcx::prepare(a.data, cfg);
    mcx::prepared_input pb = mcx::prepare(b.data, cfg);
    mcx::conditional_result ab = mcx::conditional_macrocomplexity(pa, pb, cfg);
    mcx::conditional_result ba = mcx::conditional_macrocomplexity(pb, pa, cfg);
    double dist = mcx::pair_distance(pa, pb, cfg, mode);

    json manifest = base_manifest("distance");
    manifest["compressor"] = cfg.comp.name;
    manifest["distance"] = o.distance;
    manifest["relation"] = cfg.relation.to_text();
    manifest["inputs"] = json::array({input_json(a), input_json(b)});

    json result{
        {"conditional_a_given_b", json{{"raw", ab.raw}, {"value", ab.value}}},
        {"conditional_b_given_a", json{{"raw", ba.raw}, {"value", ba.value}}},
        {"distance", dist},
        {"mode", o.distance},
        {"s_hat_a_bits", pa.s_bits},
        {"s_hat_b_bits", pb.s_bits},
    };
    emit(manifest, result, o.json_only,
         "distance=" + num(dist) + " (" + o.distance +
             ")  s_hat_a=" + num(pa.s_bits) + "  s_hat_b=" + num(pb.s_bits) +
             "  c(a|b)=" + num(ab.value) + "  c(b|a)=" + num(ba.value) + "\n");
}

// ----------------------------------------------------------------------------
// classify / loocv
// ----------------------------------------------------------------------------

void run_classify(const cli_opts& o) {
    mcx::estimator_config cfg = make_config(o);
    mcx::distance_mode mode = mcx::parse_distance_mode(o.distance);
    mcx::input_source src =
        mcx::load_input(o.input, resolve_format(o.format, o.input));
    check_rate(src, cfg.relation);
    mcx::corpus c = mcx::load_corpus(o.corpus, corpus_format(o.format, o.corpus));

    mcx::classification_result r =
        mcx::classify(src.data, src.path, c, cfg, mode);

    json manifest = base_manifest("classify");
    manifest["compressor"] = cfg.comp.name;
    manifest["corpus"] =
        json{{"dir", o.corpus}, {"exemplars", c.exemplar_count()}};
    manifest["distance"] = o.distance;
    manifest["relation"] = cfg.relation.to_text();
    manifest["inputs"] = json::array({input_json(src)});

    json per_class = json::object();
    std::string detail;
    for (const auto& [label, cd] : r.per_class) {
        per_class[label] =
            json{{"distance", cd.distance}, {"witness", cd.witness}};
        detail += "  " + label + ": " + num(cd.distance) + " (" + cd.witness +
                  ")\n";
    }
    json result{
        {"input_id", r.input_id}, {"per_class", per_class},
        {"tie", r.tie},           {"winner", r.winner},
        {"witness", r.witness},
    };
    emit(manifest, result, o.json_only,
         "winner=" + r.winner + "  distance=" +
             num(r.per_class.at(r.winner).distance) + "  witness=" + r.witness +
             "  tie=" + (r.tie ? "yes" : "no") + "\n" + detail);
}

void run_loocv(const cli_opts& o) {
    mcx::estimator_config cfg = make_config(o);
    mcx::distance_mode mode = mcx::parse_distance_mode(o.distance);
    mcx::corpus c = mcx::load_corpus(o.corpus, corpus_format(o.format, o.corpus));

    mcx::loocv_report rep = mcx::evaluate_loocv(c, cfg, mode);

    json manifest = base_manifest("loocv");
    manifest["compressor"] = cfg.comp.name;
    manifest["corpus"] =
        json{{"dir", o.corpus}, {"exemplars", c.exemplar_count()}};
    manifest["distance"] = o.distance;
    manifest["relation"] = cfg.relation.to_text();

    json confusion = json::object();
    for (const auto& [truth, row] : rep.confusion) {
        json r = json::object();
        for (const auto& [pred, count] : row)
            r[pred] = count;
        confusion[truth] = r;
    }
    json items = json::array();
    for (const auto& it : rep.items)
        items.push_back(json{
            {"correct", it.correct},
            {"distance", it.distance},
            {"id", it.id},
            {"predicted", it.predicted},
            {"tie", it.tie},
            {"true_label", it.true_label},
        });
    json result{
        {"accuracy", rep.accuracy},   {"confusion", confusion},
        {"correct", rep.correct},     {"items", items},
        {"total", rep.total},
    };

    char acc[64];
    std::snprintf(acc, sizeof acc, "accuracy=%.3f (%zu/%zu)\n", rep.accuracy,
                  rep.correct, rep.total);
    std::string human = acc;
    human += "confusion:\n";
    for (const auto& [truth, row] : rep.confusion) {
        human += "  " + truth + ":";
        for (const auto& [pred, count] : row)
            human += " " + pred + "=" + std::to_string(count);
        human += "\n";
    }
    emit(manifest, result, o.json_only, human);
}

// ----------------------------------------------------------------------------
// entropy (exact, over an enumeration table)
// ----------------------------------------------------------------------------

json member_json(const mcx::oracle::member_entropy& me) {
    return json{
        {"c_bits", me.c_bits},
        {"delta", me.delta},
        {"sigma", me.sigma},
        {"sigma_vs_k", me.sigma_vs_k},
        {"sigma_vs_k_shifted", me.sigma_vs_k_shifted},
        {"typical", me.typical},
        {"x", me.x.to_symbol_string().to_bit_text()},
    };
}

json class_json(const mcx::oracle::class_entropy& ce) {
    json members = json::array();
    for (const auto& me : ce.members)
        members.push_back(member_json(me));
    json j{
        {"canonical", ce.canonical.to_bit_text()},
        {"cardinality", ce.cardinality},
        {"class_mass", dyadic_json(ce.class_mass)},
        {"exact", ce.exact},
        {"log2_cardinality", ce.log2_cardinality},
        {"log2_cardinality_shifted", ce.log2_cardinality_shifted},
        {"members", members},
        {"partial", ce.partial},
        {"unreached_members", ce.unreached_members},
    };
    if (ce.exact)
        j["s_bits"] = ce.s_bits;
    return j;
}

void run_entropy(const cli_opts& o) {
    if ((o.L == 0) == o.table.empty())
        mcx::fail_usage("entropy needs exactly one of -L or --table");
    mcx::relation_spec rel = mcx::relation_spec::parse(o.relation);

    mcx::oracle::enumeration_table t =
        o.table.empty() ? mcx::oracle::enumerate_programs(o.L, o.max_output)
                        : mcx::oracle::read_table(o.table);

    std::uint32_t universe = o.universe;
    mcx::symbol_string input_bits;
    bool have_input = !o.input.empty();
    mcx::input_source src;
    if (have_input) {
        src = mcx::load_input(o.input, resolve_format(o.format, o.input));
        input_bits = mcx::symbol_string::from_bit_text(src.data.to_bit_text());
        universe = static_cast<std::uint32_t>(input_bits.bit_length());
    }

    mcx::oracle::entropy_report rep =
        mcx::oracle::entropy_relation_report(rel, universe, t, o.tau);

    json manifest = base_manifest("entropy");
    manifest["L"] = t.max_program_bits;
    manifest["relation"] = rel.to_text();
    manifest["tau"] = o.tau;
    manifest["universe_bits"] = universe;
    if (!o.table.empty())
        manifest["table"] = o.table;
    if (have_input)
        manifest["inputs"] = json::array({input_json(src)});

    json classes = json::array();
    std::uint64_t exact_classes = 0, partial_classes = 0;
    if (have_input) {
        mcx::symbol_string canon = mcx::canonicalize(input_bits, rel);
        for (const auto& ce : rep.classes)
            if (ce.canonical == canon) {
                classes.push_back(class_json(ce));
                exact_classes += ce.exact;
                partial_classes += ce.partial;
            }
    } else {
        for (const auto& ce : rep.classes) {
            classes.push_back(class_json(ce));
            exact_classes += ce.exact;
            partial_classes += ce.partial;
        }
    }
    json result{
        {"L", rep.L},
        {"classes", classes},
        {"overall", stats_json(rep.overall)},
        {"relation", rel.to_text()},
        {"tau", rep.tau},
        {"typical_only", stats_json(rep.typical_only)},
        {"universe_bits", rep.universe_bits},
    };
    if (have_input)
        result["input"] = input_bits.to_bit_text();

    std::string human =
        "classes=" + std::to_string(classes.size()) +
        " exact=" + std::to_string(exact_classes) +
        " partial=" + std::to_string(partial_classes) + "\ndelta overall: count=" +
        std::to_string(rep.overall.count) + " min=" + num(rep.overall.min) +
        " median=" + num(rep.overall.median) + " max=" + num(rep.overall.max) +
        "\ndelta typical: count=" + std::to_string(rep.typical_only.count) +
        " min=" + num(rep.typical_only.min) +
        " median=" + num(rep.typical_only.median) +
        " max=" + num(rep.typical_only.max) + "\n";
    emit(manifest, result, o.json_only, human);
}

// ----------------------------------------------------------------------------
// quantize
// ----------------------------------------------------------------------------

void run_quantize(const cli_opts& o) {
    mcx::relation_spec rel = mcx::relation_spec::parse(o.relation);
    mcx::input_source src =
        mcx::load_input(o.input, resolve_format(o.format, o.input));
    check_rate(src, rel);

    mcx::symbol_string canonical = mcx::canonicalize(src.data, rel);
    std::vector<std::uint8_t> out_bytes;
    switch (src.format) {
    case mcx::input_format::wav:
        out_bytes = mcx::render_wav(canonical.samples(), src.sample_rate);
        break;
    case mcx::input_format::bits: {
        std::string text = canonical.to_bit_text() + "\n";
        out_bytes.assign(text.begin(), text.end());
        break;
    }
    case mcx::input_format::raw:
        out_bytes = canonical.payload();
        break;
    }
    mcx::write_file_bytes(o.output, out_bytes);

    json manifest = base_manifest("quantize");
    manifest["relation"] = rel.to_text();
    manifest["inputs"] = json::array({input_json(src)});

    json result{
        {"changed", !(canonical == src.data)},
        {"input_id", src.path},
        {"output_bytes", out_bytes.size()},
        {"output_digest", mcx::digest_hex(out_bytes)},
        {"output_path", o.output},
        {"relation", rel.to_text()},
    };
    emit(manifest, result, o.json_only,
         "wrote " + o.output + " (" + std::to_string(out_bytes.size()) +
             " bytes, changed=" + (canonical == src.data ? "no" : "yes") +
             ")\n");
}

// ----------------------------------------------------------------------------
// oracle table / oracle verify
// ----------------------------------------------------------------------------

void run_oracle_table(const cli_opts& o) {
    mcx::oracle::enumeration_table t =
        mcx::oracle::enumerate_programs(o.L, o.max_output);
    mcx::oracle::write_table(o.output, t);

    json manifest = base_manifest("oracle-table");
    manifest["L"] = o.L;
    manifest["max_output"] = o.max_output;

    json result{
        {"L", t.max_program_bits},
        {"halting_mass", dyadic_json(t.total_mass)},
        {"max_output", t.max_output},
        {"outputs", t.entries.size()},
        {"path", o.output},
    };
    emit(manifest, result, o.json_only,
         "wrote " + o.output + ": L=" + std::to_string(t.max_program_bits) +
             " outputs=" + std::to_string(t.entries.size()) +
             " mass=" + num(t.total_mass.to_double()) + "\n");
}

void run_oracle_verify(const cli_opts& o, int& exit_code) {
    std::vector<std::string> names = o.relations;
    if (names.empty())
        names = {"identity", "multiset", "parity", "cyl:n=4"};
    std::vector<mcx::relation_spec> rels;
    for (const std::string& name : names)
        rels.push_back(mcx::relation_spec::parse(name));

    mcx::oracle::enumeration_table t =
        mcx::oracle::enumerate_programs(o.L, o.max_output);
    mcx::oracle::verify_outcome v =
        mcx::oracle::oracle_verify(t, o.universe, rels);

    json entropy = json::array();
    for (const mcx::relation_spec& rel : rels) {
        mcx::oracle::entropy_report rep =
            mcx::oracle::entropy_relation_report(rel, o.universe, t, o.tau);
        entropy.push_back(json{
            {"classes", rep.classes.size()},
            {"overall", stats_json(rep.overall)},
            {"relation", rel.to_text()},
            {"typical_only", stats_json(rep.typical_only)},
        });
    }

    json manifest = base_manifest("oracle-verify");
    manifest["L"] = o.L;
    manifest["max_output"] = o.max_output;
    manifest["relations"] = names;
    manifest["universe_bits"] = o.universe;

    json result{
        {"L", v.L},
        {"all_ok", v.all_ok()},
        {"checks",
         json{
             {"kraft", v.kraft_ok},
             {"prefix_free", v.prefix_free_ok},
             {"refinement", v.refinement_ok},
             {"s_le_c", v.s_le_c_ok},
             {"sum_identity", v.sum_identity_ok},
         }},
        {"entropy", entropy},
        {"failures", v.failures},
        {"halting_programs", v.halting_programs},
        {"universe_bits", v.universe_bits},
    };

    auto mark = [](bool ok) { return ok ? "[ok]  " : "[FAIL]"; };
    std::string human;
    human += std::string(mark(v.prefix_free_ok)) + " prefix-free (programs=" +
             std::to_string(v.halting_programs) + ")\n";
    human += std::string(mark(v.kraft_ok)) +
             " kraft (mass=" + num(t.total_mass.to_double()) + ")\n";
    human += std::string(mark(v.s_le_c_ok)) + " class minimum <= member complexity\n";
    human += std::string(mark(v.sum_identity_ok)) + " class mass sum identity\n";
    human += std::string(mark(v.refinement_ok)) + " refinement monotonicity\n";
    for (const std::string& f : v.failures)
        human += "  failure: " + f + "\n";
    human += v.all_ok() ? "all checks passed\n" : "checks FAILED\n";
    emit(manifest, result, o.json_only, human);
    if (!v.all_ok())
        exit_code = 1;
}

// ----------------------------------------------------------------------------
// synth
// ----------------------------------------------------------------------------

void run_synth_sine(const cli_opts& o) {
    mcx::synth::write_sine_fixture(o.output, o.seed);
    std::string digest = mcx::digest_hex(mcx::read_file_bytes(o.output));

    json manifest = base_manifest("synth-sine");
    manifest["seed"] = o.seed;

    json result{
        {"digest", digest},        {"path", o.output},
        {"sample_rate", 48000},    {"samples", 48000},
        {"seed", o.seed},
    };
    emit(manifest, result, o.json_only,
         "wrote " + o.output + " (48000 samples @ 48000 Hz, seed=" +
             std::to_string(o.seed) + ")\n");
}

void run_synth_corpus(const cli_opts& o) {
    mcx::synth::corpus_params p;
    p.seed = o.seed;
    p.per_class = o.per_class;
    mcx::synth::write_two_band_corpus(o.output, p);

    json manifest = base_manifest("synth-corpus");
    manifest["seed"] = o.seed;

    json result{
        {"classes", json::array({"high", "low"})},
        {"dir", o.output},
        {"files", 2 * o.per_class},
        {"per_class", o.per_class},
        {"sample_rate", p.rate},
        {"samples_per_file", p.samples},
        {"seed", o.seed},
        {"snr_db", p.snr_db},
    };
    emit(manifest, result, o.json_only,
         "wrote " + std::to_string(2 * o.per_class) + " files under " +
             o.output + " (seed=" + std::to_string(o.seed) + ")\n");
}

void add_relation_flag(CLI::App* cmd, cli_opts& o) {
    cmd->add_option("--relation", o.relation,
                    "equivalence relation (identity, multiset, parity, "
                    "speech-band, cyl:n=N, bitdepth:k=K, down:m=M, "
                    "band:rate=R,cutoff=C)")
        ->capture_default_str();
}

void add_estimator_flags(CLI::App* cmd, cli_opts& o) {
    add_relation_flag(cmd, o);
    cmd->add_option("--compressor", o.compressor,
                    "code-length source: lz78 or ext:<command>")
        ->capture_default_str();
    cmd->add_option("--format", o.format,
                    "input format: raw, bits, or wav (default: by extension)");
}

void add_json_flag(CLI::App* cmd, cli_opts& o) {
    cmd->add_flag("--json", o.json_only, "print JSON only, no stderr summary");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"macrostate complexity: exact enumeration and compressor estimates"};
    app.require_subcommand(1);
    int exit_code = 0;

    auto eo = std::make_shared<cli_opts>();
    CLI::App* est = app.add_subcommand(
        "estimate", "complexity and entropy estimates for one input");
    est->add_option("input", eo->input, "input file")->required();
    add_estimator_flags(est, *eo);
    add_json_flag(est, *eo);
    est->callback([eo] { run_estimate(*eo); });

    auto dv = std::make_shared<cli_opts>();
    CLI::App* dist = app.add_subcommand(
        "distance", "conditional complexities and distance between two inputs");
    dist->add_option("a", dv->input, "first input file")->required();
    dist->add_option("b", dv->input_b, "second input file")->required();
    add_estimator_flags(dist, *dv);
    dist->add_option("--distance", dv->distance, "distance mode: max, ncd, or sum")
        ->capture_default_str();
    add_json_flag(dist, *dv);
    dist->callback([dv] { run_distance(*dv); });

    auto co = std::make_shared<cli_opts>();
    CLI::App* cls = app.add_subcommand(
        "classify", "nearest-class label for one input against a corpus");
    cls->add_option("input", co->input, "input file")->required();
    cls->add_option("--corpus", co->corpus, "corpus directory (label subdirs)")
        ->required();
    add_estimator_flags(cls, *co);
    cls->add_option("--distance", co->distance, "distance mode: max, ncd, or sum")
        ->capture_default_str();
    add_json_flag(cls, *co);
    cls->callback([co] { run_classify(*co); });

    auto lo = std::make_shared<cli_opts>();
    CLI::App* loo = app.add_subcommand(
        "loocv", "leave-one-out cross-validation over a corpus");
    loo->add_option("--corpus", lo->corpus, "corpus directory (label subdirs)")
        ->required();
    add_estimator_flags(loo, *lo);
    loo->add_option("--distance", lo->distance, "distance mode: max, ncd, or sum")
        ->capture_default_str();
    add_json_flag(loo, *lo);
    loo->callback([lo] { run_loocv(*lo); });

    auto no = std::make_shared<cli_opts>();
    CLI::App* ent = app.add_subcommand(
        "entropy", "exact per-class entropy relation report");
    ent->add_option("input", no->input,
                    "optional input; restricts the report to its class");
    add_relation_flag(ent, *no);
    ent->add_option("-L,--program-bits", no->L, "enumerate programs up to L bits");
    ent->add_option("--table", no->table, "load a previously written table");
    ent->add_option("--universe", no->universe, "universe bit length")
        ->capture_default_str();
    ent->add_option("--max-output", no->max_output, "output length cap")
        ->capture_default_str();
    ent->add_option("--tau", no->tau, "typicality factor")->capture_default_str();
    ent->add_option("--format", no->format,
                    "input format: raw, bits, or wav (default: by extension)");
    add_json_flag(ent, *no);
    ent->callback([no] { run_entropy(*no); });

    auto qo = std::make_shared<cli_opts>();
    CLI::App* qu = app.add_subcommand(
        "quantize", "write the canonical form of an input");
    qu->add_option("input", qo->input, "input file")->required();
    qu->add_option("-o,--output", qo->output, "output file")->required();
    add_relation_flag(qu, *qo);
    qu->add_option("--format", qo->format,
                   "input format: raw, bits, or wav (default: by extension)");
    add_json_flag(qu, *qo);
    qu->callback([qo] { run_quantize(*qo); });

    CLI::App* orc = app.add_subcommand("oracle", "exact enumeration tools");
    orc->require_subcommand(1);

    auto to = std::make_shared<cli_opts>();
    CLI::App* tab = orc->add_subcommand(
        "table", "enumerate halting programs and write the output table");
    tab->add_option("-L,--program-bits", to->L, "enumerate programs up to L bits")
        ->required();
    tab->add_option("-o,--output", to->output, "table file")->required();
    tab->add_option("--max-output", to->max_output, "output length cap")
        ->capture_default_str();
    add_json_flag(tab, *to);
    tab->callback([to] { run_oracle_table(*to); });

    auto vo = std::make_shared<cli_opts>();
    CLI::App* ver = orc->add_subcommand(
        "verify", "run the exact invariant suite over a small universe");
    ver->add_option("-L,--program-bits", vo->L, "enumerate programs up to L bits")
        ->required();
    ver->add_option("--universe", vo->universe, "universe bit length")
        ->capture_default_str();
    ver->add_option("--relation", vo->relations,
                    "relation to check (repeatable; default: identity, "
                    "multiset, parity, cyl:n=4)");
    ver->add_option("--max-output", vo->max_output, "output length cap")
        ->capture_default_str();
    ver->add_option("--tau", vo->tau, "typicality factor")->capture_default_str();
    add_json_flag(ver, *vo);
    ver->callback([vo, &exit_code] { run_oracle_verify(*vo, exit_code); });

    CLI::App* syn = app.add_subcommand("synth", "deterministic audio fixtures");
    syn->require_subcommand(1);

    auto so = std::make_shared<cli_opts>();
    CLI::App* sine = syn->add_subcommand(
        "sine", "one second of a 200 Hz tone under 3.2-20 kHz noise");
    sine->add_option("-o,--output", so->output, "wav file")->required();
    sine->add_option("--seed", so->seed, "noise seed")->capture_default_str();
    add_json_flag(sine, *so);
    sine->callback([so] { run_synth_sine(*so); });

    auto bo = std::make_shared<cli_opts>();
    CLI::App* corp = syn->add_subcommand(
        "corpus", "two-band tone corpus buried in out-of-band noise");
    corp->add_option("-o,--output", bo->output, "corpus directory")->required();
    corp->add_option("--seed", bo->seed, "noise seed")->capture_default_str();
    corp->add_option("--per-class", bo->per_class, "exemplars per class (even)")
        ->capture_default_str();
    add_json_flag(corp, *bo);
    corp->callback([bo] { run_synth_corpus(*bo); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const mcx::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == mcx::error_kind::usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
