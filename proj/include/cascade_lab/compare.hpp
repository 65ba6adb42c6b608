#pragma once
// Side-by-side estimates for the main topology and strategy families.

#include <algorithm>
#include <string>
#include <vector>

#include "cascade_lab/complete_opt.hpp"
#include "cascade_lab/layers.hpp"
#include "cascade_lab/random_graph.hpp"
#include "cascade_lab/simulator.hpp"

namespace cascade {

struct ComparisonRow {
    std::string topology;
    std::string strategy;
    std::size_t n = 0;
    double p = 0.0;
    WrongCountEstimate estimate;
    // Layer sizes or the chosen q, for reference.
    std::string detail;
};

struct CompareOptions {
    SimOptions sim;
    // Replicates per grid point of the q sweep; 0 means the same as reps.
    std::size_t sweep_reps = 0;
};

// Rows: empty, complete + majority, complete + optimal thresholds, G(n, q)
// at the best q of the default grid, optimal layers, asymptotic layers.
// Row r is estimated from substream_seed(seed, r); every row reports seed.
// The asymptotic row is omitted when n is too small for that construction.
inline std::vector<ComparisonRow> compare_topologies(std::size_t n, double p, std::size_t reps, std::uint64_t seed,
                                                     CompareOptions opt = {}) {
    require_accuracy(p);
    if (n < 1)
        throw InputError("need at least one node");
    const auto maj = StrategyProfile::uniform(MajorityRule{});
    std::vector<ComparisonRow> rows;
    auto add = [&](std::string topo, std::string strat, const TopologySource& src, const StrategyProfile& profile,
                   std::string detail) {
        const std::uint64_t row_seed = substream_seed(seed, rows.size());
        ComparisonRow row{std::move(topo), std::move(strat), n, p,
                          estimate_expected_wrong(src, profile, p, reps, row_seed, opt.sim), std::move(detail)};
        row.estimate.master_seed = seed;
        rows.push_back(std::move(row));
    };

    add("empty", "maj", EmptySource{n}, maj, "");
    add("complete", "maj", CompleteSource{n}, maj, "");
    add("complete", "opt", CompleteSource{n}, threshold_strategy(compute_delta_fast(n, p)), "");

    // The sweep gets its own stream so the rows above do not depend on it.
    SweepOptions sweep_opt;
    sweep_opt.sim = opt.sim;
    const auto sweep = sweep_q(n, p, default_q_grid(n), opt.sweep_reps ? opt.sweep_reps : reps,
                               substream_seed(seed, 1000), sweep_opt);
    const auto best = std::min_element(sweep.begin(), sweep.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.estimate.mean < b.estimate.mean;
    });
    char qbuf[32];
    std::snprintf(qbuf, sizeof qbuf, "%.6g", best->q);
    add(std::string("gnq:") + qbuf, "maj", GnqSource{n, best->q}, maj, qbuf);

    const LayerDesign exact = optimal_layers_exact(n, p).design;
    add("layers-exact", "maj", LayersSource{exact}, maj, format_layer_sizes(exact));

    if (std::log(static_cast<double>(n)) / std::log(layer_log_base(p)) >= 2.0) {
        const LayerDesign asym = asymptotic_layers(n, p);
        add("layers-asymptotic", "maj", LayersSource{asym}, maj, format_layer_sizes(asym));
    }
    return rows;
}

} // namespace cascade
