#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <future>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "estimators.hpp"
#include "io.hpp"

namespace mcx {

// ============================================================================
// corpus
// ============================================================================

struct exemplar {
    std::string id; // unique corpus-wide; "<label>/<filename>" when loaded
    std::string label;
    symbol_string data;
    std::string path;
    std::string digest;
};

struct corpus {
    std::map<std::string, std::vector<exemplar>> classes; // label -> exemplars

    std::size_t exemplar_count() const {
        std::size_t n = 0;
        for (const auto& [label, items] : classes)
            n += items.size();
        return n;
    }

    void validate() const {
        if (classes.empty())
            fail_data("corpus has no classes");
        std::map<std::string, int> ids;
        for (const auto& [label, items] : classes) {
            if (items.empty())
                fail_data("corpus class '" + label + "' has no exemplars");
            for (const exemplar& e : items) {
                if (e.label != label)
                    fail_data("exemplar '" + e.id + "' filed under class '" +
                              label + "' but labeled '" + e.label + "'");
                if (++ids[e.id] > 1)
                    fail_data("duplicate exemplar id '" + e.id + "'");
            }
        }
    }
};

// Directory layout: <dir>/<label>/<exemplar files>; every file is loaded with
// the given format. Hidden entries are skipped; order is name-sorted.
inline corpus load_corpus(const std::string& dir, input_format format) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        fail_data("corpus directory not found: " + dir);
    corpus c;
    std::vector<fs::path> labels;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() &&
            !entry.path().filename().string().starts_with("."))
            labels.push_back(entry.path());
    std::sort(labels.begin(), labels.end());
    for (const fs::path& label_dir : labels) {
        std::string label = label_dir.filename().string();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(label_dir))
            if (entry.is_regular_file() &&
                !entry.path().filename().string().starts_with("."))
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        std::vector<exemplar>& items = c.classes[label];
        for (const fs::path& file : files) {
            input_source src = load_input(file.string(), format);
            items.push_back({label + "/" + file.filename().string(), label,
                             std::move(src.data), file.string(), src.digest});
        }
    }
    c.validate();
    return c;
}

// ============================================================================
// distance evaluation
// ============================================================================

namespace detail {

// Runs fn(i) for i in [0, n) across a few worker tasks; results land in a
// pre-sized vector so assembly order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> tasks;
    unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    for (unsigned w = 0; w < count; ++w)
        tasks.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                fn(i);
        }));
    for (auto& t : tasks)
        t.get();
}

struct prepared_exemplar {
    const exemplar* source;
    prepared_input prep;
};

inline std::vector<prepared_exemplar>
prepare_all(const std::vector<const exemplar*>& items, const estimator_config& cfg) {
    std::vector<prepared_exemplar> out(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        out[i] = {items[i], prepare(items[i]->data, cfg)};
    });
    return out;
}

} // namespace detail

struct class_distance_result {
    double distance = 0.0;
    std::string witness; // exemplar id achieving the minimum
};

struct classification_result {
    std::string input_id;
    std::string winner;
    std::map<std::string, class_distance_result> per_class;
    std::string witness; // the winner's witness
    bool tie = false;
};

namespace detail {

// Distances from one prepared input to every exemplar, grouped per class,
// with the documented lexicographic tie-breaks. skip_id leaves one exemplar
// out (for cross-validation).
inline classification_result
classify_prepared(const prepared_input& input, const std::string& input_id,
                  const std::vector<prepared_exemplar>& exemplars,
                  const estimator_config& cfg, distance_mode mode,
                  const std::string& skip_id = {}) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < exemplars.size(); ++i)
        if (skip_id.empty() || exemplars[i].source->id != skip_id)
            active.push_back(i);

    std::vector<double> dist(active.size());
    parallel_for(active.size(), [&](std::size_t j) {
        dist[j] = pair_distance(input, exemplars[active[j]].prep, cfg, mode);
    });

    classification_result result;
    result.input_id = input_id;
    std::map<std::string, std::vector<std::pair<std::string, double>>> grouped;
    for (std::size_t j = 0; j < active.size(); ++j) {
        const exemplar* e = exemplars[active[j]].source;
        grouped[e->label].push_back({e->id, dist[j]});
    }
    for (auto& [label, items] : grouped) {
        std::sort(items.begin(), items.end()); // id order for the tie-break
        class_distance_result best{items.front().second, items.front().first};
        for (const auto& [id, d] : items)
            if (d < best.distance) {
                best.distance = d;
                best.witness = id;
            }
        result.per_class[label] = best;
    }
    if (result.per_class.empty())
        fail_data("no exemplars available to classify against");

    bool first = true;
    double best = 0.0;
    for (const auto& [label, cd] : result.per_class) {
        // map order is lexicographic, so the first minimum wins ties
        if (first || cd.distance < best) {
            first = false;
            best = cd.distance;
            result.winner = label;
            result.witness = cd.witness;
            result.tie = false;
        } else if (cd.distance == best) {
            result.tie = true;
        }
    }
    return result;
}

inline std::vector<const exemplar*> all_exemplars(const corpus& c) {
    std::vector<const exemplar*> out;
    for (const auto& [label, items] : c.classes)
        for (const exemplar& e : items)
            out.push_back(&e);
    return out;
}

} // namespace detail

inline class_distance_result class_distance(const symbol_string& x,
                                            const std::string& label,
                                            const corpus& c,
                                            const estimator_config& cfg,
                                            distance_mode mode) {
    auto it = c.classes.find(label);
    if (it == c.classes.end())
        fail_data("unknown class label '" + label + "'");
    std::vector<const exemplar*> items;
    for (const exemplar& e : it->second)
        items.push_back(&e);
    auto prepped = detail::prepare_all(items, cfg);
    prepared_input input = prepare(x, cfg);

    std::vector<double> dist(prepped.size());
    detail::parallel_for(prepped.size(), [&](std::size_t i) {
        dist[i] = pair_distance(input, prepped[i].prep, cfg, mode);
    });
    std::vector<std::pair<std::string, double>> by_id;
    for (std::size_t i = 0; i < prepped.size(); ++i)
        by_id.push_back({prepped[i].source->id, dist[i]});
    std::sort(by_id.begin(), by_id.end());
    class_distance_result best{by_id.front().second, by_id.front().first};
    for (const auto& [id, d] : by_id)
        if (d < best.distance)
            best = {d, id};
    return best;
}

inline classification_result classify(const symbol_string& x,
                                      const std::string& input_id,
                                      const corpus& c,
                                      const estimator_config& cfg,
                                      distance_mode mode = distance_mode::normalized) {
    c.validate();
    auto prepped = detail::prepare_all(detail::all_exemplars(c), cfg);
    return detail::classify_prepared(prepare(x, cfg), input_id, prepped, cfg, mode);
}

// ============================================================================
// leave-one-out evaluation
// ============================================================================

struct loocv_item {
    std::string id;
    std::string true_label;
    std::string predicted;
    double distance = 0.0;
    bool tie = false;
    bool correct = false;
};

struct loocv_report {
    double accuracy = 0.0;
    std::size_t total = 0;
    std::size_t correct = 0;
    // confusion[true_label][predicted_label] = count
    std::map<std::string, std::map<std::string, std::size_t>> confusion;
    std::vector<loocv_item> items;
};

inline loocv_report evaluate_loocv(const corpus& c, const estimator_config& cfg,
                                   distance_mode mode = distance_mode::normalized) {
    c.validate();
    for (const auto& [label, items] : c.classes)
        if (items.size() < 2)
            fail_usage("leave-one-out requires >= 2 exemplars per class; class '" +
                       label + "' has " + std::to_string(items.size()));

    auto prepped = detail::prepare_all(detail::all_exemplars(c), cfg);
    loocv_report rep;
    for (const auto& pe : prepped) {
        const exemplar& held_out = *pe.source;
        classification_result r =
            detail::classify_prepared(pe.prep, held_out.id, prepped, cfg, mode,
                                      held_out.id);
        loocv_item item;
        item.id = held_out.id;
        item.true_label = held_out.label;
        item.predicted = r.winner;
        item.distance = r.per_class.at(r.winner).distance;
        item.tie = r.tie;
        item.correct = item.predicted == item.true_label;
        rep.confusion[item.true_label][item.predicted] += 1;
        rep.total += 1;
        rep.correct += item.correct ? 1 : 0;
        rep.items.push_back(std::move(item));
    }
    rep.accuracy = rep.total ? static_cast<double>(rep.correct) /
                                   static_cast<double>(rep.total)
                             : 0.0;
    return rep;
}

} // namespace mcx
