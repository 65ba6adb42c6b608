#pragma once
// Majority cascades on G(n, q): the q sweep and empirical checks of the
// conditional failure bounds.

#include <cmath>
#include <vector>

#include "cascade_lab/gnq.hpp"
#include "cascade_lab/simulator.hpp"

namespace cascade {

struct SweepRow {
    std::size_t n = 0;
    double q = 0.0;
    WrongCountEstimate estimate;
};

// 0, 25 geometric points n^(-1 + k/25) for k = 0..24, and 1.
inline std::vector<double> default_q_grid(std::size_t n) {
    if (n < 1)
        throw InputError("need at least one node");
    std::vector<double> grid{0.0};
    const double ln = std::log(static_cast<double>(n));
    for (int k = 0; k < 25; ++k)
        grid.push_back(std::exp(ln * (-1.0 + k / 25.0)));
    grid.push_back(1.0);
    return grid;
}

struct SweepOptions {
    SimOptions sim;
    // Quenched variant: one graph per grid point instead of one per replicate.
    bool fixed_graph = false;
};

// Row r uses master seed substream_seed(seed, r); the rows report `seed`.
inline std::vector<SweepRow> sweep_q(std::size_t n, double p, const std::vector<double>& q_grid, std::size_t reps,
                                     std::uint64_t seed, SweepOptions opt = {}) {
    require_accuracy(p);
    if (reps < 2)
        throw InputError("need at least two replicates");
    for (double q : q_grid)
        if (!(q >= 0.0 && q <= 1.0))
            throw InputError("grid values must lie in [0, 1]");
    const auto maj = StrategyProfile::uniform(MajorityRule{});
    std::vector<SweepRow> rows;
    rows.reserve(q_grid.size());
    for (std::size_t r = 0; r < q_grid.size(); ++r) {
        const std::uint64_t row_seed = substream_seed(seed, r);
        TopologySource src = GnqSource{n, q_grid[r]};
        if (opt.fixed_graph)
            src = FixedSource{std::make_shared<const Topology>(sample_gnq(n, q_grid[r], splitmix64(row_seed)))};
        SweepRow row{n, q_grid[r], estimate_expected_wrong(src, maj, p, reps, row_seed, opt.sim)};
        row.estimate.master_seed = seed;
        rows.push_back(row);
    }
    return rows;
}

// exp(-q i (sqrt(f) - sqrt(1-f))^2)
inline double exponential_bound(std::size_t i, double q, double f) {
    if (!(f >= 0.0 && f <= 1.0))
        throw InputError("fraction must lie in [0, 1]");
    const double g = std::sqrt(f) - std::sqrt(1.0 - f);
    return std::exp(-q * static_cast<double>(i) * g * g);
}

// (p + sqrt(p) / (sqrt(p) + sqrt(1-p))) / 2, the fraction of correct nodes
// used by the segment argument for random graphs.
inline double segment_fraction_constant(double p) {
    require_accuracy(p);
    const double sp = std::sqrt(p), sq = std::sqrt(1.0 - p);
    return 0.5 * (p + sp / (sp + sq));
}

struct ForcedPrefixSpec {
    std::size_t i = 0;
    double f = 1.0;

    std::size_t correct() const { return static_cast<std::size_t>(std::floor(f * static_cast<double>(i) + 1e-9)); }
    std::size_t wrong() const { return i - correct(); }
};

// Failure probability of node i+1 when the first i outputs are forced
// (floor(f i) correct, the rest wrong) and node i+1 applies the majority
// rule to a fresh G(n, q) neighbourhood.
inline WrongCountEstimate forced_prefix_failure(std::size_t n, double q, double p, const ForcedPrefixSpec& spec,
                                                std::size_t reps, std::uint64_t seed, SimOptions opt = {}) {
    require_accuracy(p);
    if (!(spec.f > 0.5 && spec.f <= 1.0))
        throw InputError("forced fraction must satisfy 0.5 < f <= 1");
    if (spec.i >= n)
        throw InputError("prefix must be shorter than n");
    if (!(q >= 0.0 && q <= 1.0))
        throw InputError("connection probability must lie in [0, 1]");
    if (reps < 2)
        throw InputError("need at least two replicates");
    const long right = static_cast<long>(spec.correct()), wrong = static_cast<long>(spec.wrong());
    std::vector<double> samples(reps);
    const unsigned workers = resolve_workers(opt.workers);
    const std::size_t blocks = std::min<std::size_t>(reps, workers);
    parallel_for(blocks, workers, [&](std::size_t b) {
        for (std::size_t r = reps * b / blocks; r < reps * (b + 1) / blocks; ++r) {
            Engine eng = substream(seed, r);
            const Bit s = detail::draw_signal(eng, p, opt.truth);
            const long agree = detail::draw_binomial(eng, right, q);
            const long disagree = detail::draw_binomial(eng, wrong, q);
            const long d = opt.truth ? agree - disagree : disagree - agree;
            const Bit c = detail::majority_from_diff(d + (s ? 1 : -1), s);
            samples[r] = c != opt.truth ? 1.0 : 0.0;
        }
    });
    return summarize(samples, seed);
}

} // namespace cascade
