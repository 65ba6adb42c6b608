#pragma once
// Deterministic single-trace cascade engine.

#include <span>
#include <string>
#include <vector>

#include "cascade_lab/strategy.hpp"
#include "cascade_lab/topology.hpp"

namespace cascade {

struct DecisionTrace {
    std::vector<Bit> signals;
    std::vector<Bit> decisions;
    // valid_mask[k] is 1 when node k+1 revealed its signal.
    std::vector<std::uint8_t> valid_mask;

    std::size_t size() const { return decisions.size(); }

    std::size_t wrong_count(Bit truth = 1) const {
        std::size_t w = 0;
        for (Bit c : decisions)
            w += (c != truth);
        return w;
    }
};

namespace detail {

// Decisions made so far plus prefix sums, so that nodes whose neighbours
// form one index range are tallied in O(1).
class CascadeWorkspace {
public:
    void reset(std::size_t n) {
        decisions.assign(n, 0);
        valid.assign(n, 0);
        cum_ones.assign(n + 1, 0);
        cum_valid_ones.assign(n + 1, 0);
        cum_valid_zeros.assign(n + 1, 0);
    }

    // Record node k (0-based); every node before k must already be set.
    void commit(std::size_t k, Bit decision, bool is_valid) {
        decisions[k] = decision;
        valid[k] = is_valid;
        cum_ones[k + 1] = cum_ones[k] + decision;
        cum_valid_ones[k + 1] = cum_valid_ones[k] + (is_valid && decision);
        cum_valid_zeros[k + 1] = cum_valid_zeros[k] + (is_valid && !decision);
    }

    Tally tally_range(std::size_t lo, std::size_t hi) const {
        Tally t;
        t.ones = cum_ones[hi] - cum_ones[lo];
        t.zeros = static_cast<long>(hi - lo) - t.ones;
        t.valid_ones = cum_valid_ones[hi] - cum_valid_ones[lo];
        t.valid_zeros = cum_valid_zeros[hi] - cum_valid_zeros[lo];
        return t;
    }

    // Tallies of nodes 0..k-1 (everything decided so far before node k).
    Tally tally_prefix(std::size_t k) const { return tally_range(0, k); }

    Response respond(const Topology& g, const StrategyProfile& profile, NodeIndex i) {
        const Rule& rule = profile.rule_for(i);
        if (is_custom(rule)) {
            obs_decisions.clear();
            obs_valid.clear();
            g.for_each_neighbor(i, [&](std::size_t j) {
                obs_decisions.push_back(decisions[j]);
                obs_valid.push_back(valid[j]);
            });
            return detail::respond(rule, Observation{i, obs_decisions, obs_valid});
        }
        return respond_builtin(rule, i, tally(g, i));
    }

    Tally tally(const Topology& g, NodeIndex i) const {
        const auto& nb = g.neighbors_raw(i);
        if (const auto* r = std::get_if<Topology::Range>(&nb))
            return tally_range(r->lo, r->hi);
        Tally t;
        for (std::uint32_t j : std::get<std::vector<std::uint32_t>>(nb)) {
            if (decisions[j]) {
                ++t.ones;
                t.valid_ones += valid[j];
            } else {
                ++t.zeros;
                t.valid_zeros += valid[j];
            }
        }
        return t;
    }

    std::vector<Bit> decisions;
    std::vector<std::uint8_t> valid;
    std::vector<long> cum_ones, cum_valid_ones, cum_valid_zeros;

private:
    std::vector<Bit> obs_decisions;
    std::vector<std::uint8_t> obs_valid;
};

} // namespace detail

// Nodes decide in order 1..n; node i applies its rule to the decisions of its
// earlier neighbours and its own signal.
inline DecisionTrace run_sequence(const Topology& g, const StrategyProfile& profile,
                                  std::span<const Bit> signals) {
    const std::size_t n = g.size();
    if (signals.size() != n)
        throw InputError("expected " + std::to_string(n) + " signals, got " +
                         std::to_string(signals.size()));
    profile.check_covers(n);

    detail::CascadeWorkspace ws;
    ws.reset(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto r = ws.respond(g, profile, k + 1);
        ws.commit(k, r(signals[k] & 1), r.revealing());
    }
    DecisionTrace trace;
    trace.signals.assign(signals.begin(), signals.end());
    trace.decisions = std::move(ws.decisions);
    trace.valid_mask = std::move(ws.valid);
    return trace;
}

inline DecisionTrace run_sequence(const Topology& g, const StrategyProfile& profile,
                                  const std::vector<Bit>& signals) {
    return run_sequence(g, profile, std::span<const Bit>(signals));
}

inline std::vector<Bit> valid_subsequence(const DecisionTrace& trace) {
    std::vector<Bit> out;
    for (std::size_t k = 0; k < trace.decisions.size(); ++k)
        if (trace.valid_mask[k])
            out.push_back(trace.decisions[k]);
    return out;
}

} // namespace cascade
