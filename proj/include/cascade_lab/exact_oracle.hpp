#pragma once
// Brute-force exact computations for small instances. Everything here is
// templated on the number type: double for speed, Rational for exact
// answers when p is rational.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cascade_lab/engine.hpp"

namespace cascade {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kMaxEnumerationNodes = 24;
inline constexpr std::size_t kMaxExhaustiveNodes = 10;

template <class Real>
struct ExactLoss {
    Real expected_wrong{};
    std::size_t n = 0;
};

namespace detail {

template <class Real>
double to_double(const Real& x) {
    if constexpr (std::is_floating_point_v<Real>)
        return static_cast<double>(x);
    else
        return x.template convert_to<double>();
}

// a < b with a 1e-12 margin for floating types, exactly otherwise.
template <class Real>
bool strictly_less(const Real& a, const Real& b) {
    if constexpr (std::is_floating_point_v<Real>)
        return a < b - Real(1e-12);
    else
        return a < b;
}

template <class Real>
Real pow_int(Real base, unsigned e) {
    Real r(1);
    while (e) {
        if (e & 1u)
            r *= base;
        base *= base;
        e >>= 1u;
    }
    return r;
}

template <class Real>
struct Enumeration {
    Real total{};
    std::vector<Real> per_node;
};

// Depth-first walk over all 2^n signal vectors. Decisions of node k only
// depend on signals 1..k, so each tree node evaluates one rule.
template <class Real>
Enumeration<Real> enumerate_signals(const Topology& g, const StrategyProfile& profile, const Real& p,
                                    Bit truth) {
    const std::size_t n = g.size();
    if (n > kMaxEnumerationNodes)
        throw CapacityError("exact enumeration supports at most " + std::to_string(kMaxEnumerationNodes) +
                            " nodes, got " + std::to_string(n));
    if (!(p > Real(1) / 2 && p <= Real(1)))
        throw InputError("signal accuracy must satisfy 0.5 < p <= 1");
    if (truth > 1)
        throw InputError("ground truth must be 0 or 1");
    profile.check_covers(n);

    Enumeration<Real> acc;
    acc.per_node.assign(n, Real(0));
    CascadeWorkspace ws;
    ws.reset(n);
    const Real q = Real(1) - p;

    auto walk = [&](auto&& self, std::size_t k, const Real& mass) -> void {
        if (k == n)
            return;
        const Response r = ws.respond(g, profile, k + 1);
        for (Bit s = 0; s <= 1; ++s) {
            const Real& ps = (s == truth) ? p : q;
            if (ps == Real(0))
                continue;
            const Real branch = mass * ps;
            const Bit c = r(s);
            ws.commit(k, c, r.revealing());
            if (c != truth)
                acc.per_node[k] += branch;
            self(self, k + 1, branch);
        }
    };
    walk(walk, 0, Real(1));
    for (const auto& x : acc.per_node)
        acc.total += x;
    return acc;
}

} // namespace detail

// Expected number of nodes whose decision differs from the truth.
template <class Real = double>
ExactLoss<Real> exact_expected_wrong(const Topology& g, const StrategyProfile& profile, const Real& p,
                                     Bit truth = 1) {
    auto e = detail::enumerate_signals<Real>(g, profile, p, truth);
    return {e.total, g.size()};
}

// Pr[decision of node i != truth].
template <class Real = double>
Real failure_prob_node(const Topology& g, const StrategyProfile& profile, const Real& p, NodeIndex i,
                       Bit truth = 1) {
    if (i < 1 || i > g.size())
        throw InputError("node index " + std::to_string(i) + " out of range 1.." + std::to_string(g.size()));
    return detail::enumerate_signals<Real>(g, profile, p, truth).per_node[i - 1];
}

template <class Real = double>
std::vector<Real> failure_probs(const Topology& g, const StrategyProfile& profile, const Real& p,
                                Bit truth = 1) {
    return detail::enumerate_signals<Real>(g, profile, p, truth).per_node;
}

// Deterministic actions available to a node that sees the full history.
enum class OracleAction { reveal, output_zero, output_one, negate };

inline const char* to_string(OracleAction a) {
    switch (a) {
    case OracleAction::reveal:
        return "reveal";
    case OracleAction::output_zero:
        return "output_0";
    case OracleAction::output_one:
        return "output_1";
    case OracleAction::negate:
        return "negate";
    }
    return "?";
}

template <class Real>
struct OracleResult {
    ExactLoss<Real> loss;
    // Decision history of nodes 1..k (as a '0'/'1' string) -> action of node
    // k+1, for every history reachable under the optimal profile.
    std::map<std::string, OracleAction> actions;
};

namespace detail {

// Search over the whole decision-history tree of the complete graph. Each
// history carries the signed diff of the signals its revealing actions
// exposed, which fixes the posterior on the truth.
template <class Real>
class HistorySearch {
public:
    HistorySearch(std::size_t n, const Real& p) : n_(n), p_(p) {
        const Real r = (Real(1) - p) / p;
        posterior_.resize(2 * n + 1);
        for (long d = -static_cast<long>(n); d <= static_cast<long>(n); ++d) {
            const Real rd = d >= 0 ? pow_int(r, static_cast<unsigned>(d))
                                   : pow_int(Real(1) / r, static_cast<unsigned>(-d));
            posterior_[static_cast<std::size_t>(d + static_cast<long>(n))] = Real(1) / (Real(1) + rd);
        }
    }

    struct Choice {
        Real value;
        OracleAction action;
    };

    // Minimum expected number of wrong nodes among k+1..n (k nodes decided).
    Real value(std::size_t k, long diff) const { return choose(k, diff).value; }

    // Histories with equal (k, diff) lead to identical subproblems, so the
    // search is memoised on that pair.
    Choice choose(std::size_t k, long diff) const {
        if (k == n_)
            return {Real(0), OracleAction::reveal};
        const auto key = std::make_pair(k, diff);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        const Real truth_one = posterior(diff);
        const Real sig_one = truth_one * p_ + (Real(1) - truth_one) * (Real(1) - p_);
        const Real sig_zero = Real(1) - sig_one;

        // Reveal and negate expose the same information; each child history
        // is searched separately all the same.
        const Real reveal = (Real(1) - p_) + sig_one * value(k + 1, diff + 1) +
                            sig_zero * value(k + 1, diff - 1);
        const Real negate = p_ + sig_one * value(k + 1, diff + 1) + sig_zero * value(k + 1, diff - 1);
        const Real zero = truth_one + value(k + 1, diff);
        const Real one = (Real(1) - truth_one) + value(k + 1, diff);

        Choice best{reveal, OracleAction::reveal};
        for (const Choice& c : {Choice{negate, OracleAction::negate}, Choice{zero, OracleAction::output_zero},
                                Choice{one, OracleAction::output_one}})
            if (strictly_less(c.value, best.value))
                best = c;
        memo_.emplace(key, best);
        return best;
    }

    // Walk the histories reachable under the optimal actions.
    void record(std::size_t k, long diff, std::string& history,
                std::map<std::string, OracleAction>& out) const {
        if (k == n_)
            return;
        const Choice c = choose(k, diff);
        out[history] = c.action;
        auto descend = [&](char bit, long next_diff) {
            history.push_back(bit);
            record(k + 1, next_diff, history, out);
            history.pop_back();
        };
        switch (c.action) {
        case OracleAction::reveal:
            descend('0', diff - 1);
            descend('1', diff + 1);
            break;
        case OracleAction::negate:
            descend('0', diff + 1);
            descend('1', diff - 1);
            break;
        case OracleAction::output_zero:
            descend('0', diff);
            break;
        case OracleAction::output_one:
            descend('1', diff);
            break;
        }
    }

private:
    const Real& posterior(long d) const {
        return posterior_[static_cast<std::size_t>(d + static_cast<long>(n_))];
    }

    std::size_t n_;
    Real p_;
    std::vector<Real> posterior_;
    mutable std::map<std::pair<std::size_t, long>, Choice> memo_;
};

} // namespace detail

// Minimum expected wrong count over all deterministic strategy profiles on
// the complete graph, by backward induction over every decision history.
// Ties between actions go to reveal.
template <class Real = double>
OracleResult<Real> exhaustive_optimal_complete(std::size_t n, const Real& p) {
    if (n < 1)
        throw InputError("need at least one node");
    if (n > kMaxExhaustiveNodes)
        throw CapacityError("exhaustive search supports at most " + std::to_string(kMaxExhaustiveNodes) +
                            " nodes, got " + std::to_string(n));
    if (!(p > Real(1) / 2 && p < Real(1)))
        throw InputError("signal accuracy must satisfy 0.5 < p < 1");
    detail::HistorySearch<Real> search(n, p);
    OracleResult<Real> result;
    result.loss = {search.value(0, 0), n};
    std::string history;
    search.record(0, 0, history, result.actions);
    return result;
}

// True when every recorded action either reveals or outputs the strict
// majority of all earlier decisions.
template <class Real>
bool has_reveal_or_majority_shape(const OracleResult<Real>& result) {
    for (const auto& [history, action] : result.actions) {
        if (action == OracleAction::reveal)
            continue;
        long d = 0;
        for (char c : history)
            d += c == '1' ? 1 : -1;
        if (d > 0 && action == OracleAction::output_one)
            continue;
        if (d < 0 && action == OracleAction::output_zero)
            continue;
        return false;
    }
    return true;
}

} // namespace cascade
