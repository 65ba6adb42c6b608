#pragma once
// Seeded Monte Carlo estimation of the expected number of wrong nodes.
//
// Replicate r always draws from substream(master_seed, r) and samples are
// reduced in replicate order, so estimates are bit-identical for any worker
// count.

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "cascade_lab/engine.hpp"
#include "cascade_lab/gnq.hpp"
#include "cascade_lab/layers.hpp"
#include "cascade_lab/parallel.hpp"
#include "cascade_lab/rng.hpp"

namespace cascade {

struct WrongCountEstimate {
    double mean = 0.0;
    double ci95_halfwidth = 0.0;
    std::size_t reps = 0;
    std::uint64_t master_seed = 0;

    double standard_error() const { return ci95_halfwidth / 1.96; }
};

inline WrongCountEstimate summarize(const std::vector<double>& samples, std::uint64_t seed) {
    WrongCountEstimate est;
    est.reps = samples.size();
    est.master_seed = seed;
    if (samples.empty())
        return est;
    double sum = 0.0;
    for (double x : samples)
        sum += x;
    est.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples)
            ss += (x - est.mean) * (x - est.mean);
        const double sd = std::sqrt(ss / static_cast<double>(samples.size() - 1));
        est.ci95_halfwidth = 1.96 * sd / std::sqrt(static_cast<double>(samples.size()));
    }
    return est;
}

struct FixedSource {
    std::shared_ptr<const Topology> topology;
};
// Resampled for every replicate.
struct GnqSource {
    std::size_t n = 0;
    double q = 0.0;
};
struct LayersSource {
    LayerDesign design;
};
struct EmptySource {
    std::size_t n = 0;
};
struct CompleteSource {
    std::size_t n = 0;
};

using TopologySource = std::variant<FixedSource, GnqSource, LayersSource, EmptySource, CompleteSource>;

inline std::size_t source_size(const TopologySource& src) {
    return std::visit(
        [](const auto& s) -> std::size_t {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FixedSource>)
                return s.topology ? s.topology->size() : 0;
            else if constexpr (std::is_same_v<T, LayersSource>)
                return s.design.n();
            else
                return s.n;
        },
        src);
}

struct SimOptions {
    unsigned workers = 0;
    Bit truth = 1;
};

namespace detail {

inline Bit draw_signal(Engine& eng, double p, Bit truth) {
    std::bernoulli_distribution correct(p);
    return correct(eng) ? truth : static_cast<Bit>(1 - truth);
}

inline long draw_binomial(Engine& eng, long trials, double q) {
    if (trials <= 0 || q <= 0.0)
        return 0;
    if (q >= 1.0)
        return trials;
    return std::binomial_distribution<long>(trials, q)(eng);
}

// One replicate on a fixed topology.
inline std::size_t replicate_fixed(const Topology& g, const StrategyProfile& profile, double p, Bit truth,
                                   Engine& eng, CascadeWorkspace& ws) {
    const std::size_t n = g.size();
    ws.reset(n);
    std::size_t wrong = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Bit s = draw_signal(eng, p, truth);
        const Response r = ws.respond(g, profile, k + 1);
        const Bit c = r(s);
        ws.commit(k, c, r.revealing());
        wrong += (c != truth);
    }
    return wrong;
}

// One replicate on a fresh G(n, q) with built-in rules. The edges into node
// i are independent of everything that happened before node i decides, so
// its neighbourhood is drawn lazily: the number of neighbours in each
// (decision, validity) class of earlier nodes is Binomial(class size, q).
inline std::size_t replicate_gnq_lazy(std::size_t n, double q, const StrategyProfile& profile, double p,
                                      Bit truth, Engine& eng, CascadeWorkspace& ws) {
    ws.reset(n);
    std::size_t wrong = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const NodeIndex i = k + 1;
        const Bit s = draw_signal(eng, p, truth);
        const Rule& rule = profile.rule_for(i);
        const Tally before = ws.tally_prefix(k);
        Tally t;
        if (std::holds_alternative<MajorityRule>(rule)) {
            t.ones = draw_binomial(eng, before.ones, q);
            t.zeros = draw_binomial(eng, before.zeros, q);
        } else if (std::holds_alternative<ThresholdRule>(rule)) {
            t.valid_ones = draw_binomial(eng, before.valid_ones, q);
            t.valid_zeros = draw_binomial(eng, before.valid_zeros, q);
            t.ones = t.valid_ones + draw_binomial(eng, before.ones - before.valid_ones, q);
            t.zeros = t.valid_zeros + draw_binomial(eng, before.zeros - before.valid_zeros, q);
        }
        const Response r = respond_builtin(rule, i, t);
        const Bit c = r(s);
        ws.commit(k, c, r.revealing());
        wrong += (c != truth);
    }
    return wrong;
}

} // namespace detail

inline WrongCountEstimate estimate_expected_wrong(const TopologySource& source, const StrategyProfile& profile,
                                                  double p, std::size_t reps, std::uint64_t master_seed,
                                                  SimOptions opt = {}) {
    if (!(p > 0.5 && p <= 1.0))
        throw InputError("signal accuracy must satisfy 0.5 < p <= 1");
    if (reps < 2)
        throw InputError("need at least two replicates for a confidence interval");
    const std::size_t n = source_size(source);
    if (n < 1)
        throw InputError("empty topology source");
    profile.check_covers(n);

    std::shared_ptr<const Topology> fixed;
    const GnqSource* gnq = std::get_if<GnqSource>(&source);
    if (gnq) {
        if (!(gnq->q >= 0.0 && gnq->q <= 1.0))
            throw InputError("connection probability must lie in [0, 1]");
    } else if (const auto* f = std::get_if<FixedSource>(&source)) {
        fixed = f->topology;
    } else if (const auto* l = std::get_if<LayersSource>(&source)) {
        fixed = std::make_shared<const Topology>(build_layer_topology(l->design));
    } else if (const auto* e = std::get_if<EmptySource>(&source)) {
        fixed = std::make_shared<const Topology>(Topology::empty(e->n));
    } else {
        fixed = std::make_shared<const Topology>(Topology::complete(std::get<CompleteSource>(source).n));
    }
    const bool lazy = gnq && !profile.any_custom();

    std::vector<double> samples(reps);
    const unsigned workers = resolve_workers(opt.workers);
    const std::size_t blocks = std::min<std::size_t>(reps, workers);
    parallel_for(blocks, workers, [&](std::size_t b) {
        detail::CascadeWorkspace ws;
        for (std::size_t r = reps * b / blocks; r < reps * (b + 1) / blocks; ++r) {
            Engine eng = substream(master_seed, r);
            std::size_t wrong;
            if (lazy) {
                wrong = detail::replicate_gnq_lazy(gnq->n, gnq->q, profile, p, opt.truth, eng, ws);
            } else if (gnq) {
                const Topology g = sample_gnq(gnq->n, gnq->q, eng());
                wrong = detail::replicate_fixed(g, profile, p, opt.truth, eng, ws);
            } else {
                wrong = detail::replicate_fixed(*fixed, profile, p, opt.truth, eng, ws);
            }
            samples[r] = static_cast<double>(wrong);
        }
    });
    return summarize(samples, master_seed);
}

} // namespace cascade
