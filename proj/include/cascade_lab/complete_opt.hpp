#pragma once
// Optimal strategy on the complete graph.
//
// Every node either reveals its signal or follows the majority of all earlier
// decisions, and once one node follows the majority all later nodes do too.
// The state seen by node i is therefore d = |diff| of the i-1 revealed
// signals, and E(i, d) is the expected total number of wrong nodes from that
// state under optimal play. Node i reveals iff d < delta(i).
//
// Internally the recursion runs on F(i, d), the expected number of wrong
// nodes among i..n only; E(i, d) = F(i, d) + the expected number of wrong
// revealers among 1..i-1. F depends on (n - i, d) alone, which makes the
// thresholds a function of the number of remaining nodes.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cascade_lab/strategy.hpp"

namespace cascade {

// A reveal value must beat the majority value by more than this to count as
// revealing; closer calls go to the majority.
inline constexpr double kDeltaSlack = 1e-9;

// Node k reveals from |diff| = d. e_up = E(k+1, d+1), e_down = E(k+1, d-1).
inline double reveal_step_value(double e_up, double e_down, double p, long d) {
    if (d < 0)
        throw InputError("diff magnitude must be non-negative");
    if (d == 0)
        return e_up;
    const double w = posterior_truth_given_diff(p, d);
    const double q1 = w * p + (1.0 - w) * (1.0 - p);
    return q1 * e_up + (1.0 - q1) * e_down;
}

// Node k and every later node follow the majority of the k-1 revealed
// signals. If the majority is right, (k-1-d)/2 revealers were wrong;
// otherwise every other node is.
inline double majority_step_value(std::size_t n, std::size_t k, long d, double p) {
    if (k < 2 || d < 1 || static_cast<std::size_t>(d) > k - 1 || (k - 1 - d) % 2 != 0)
        throw InputError("majority step needs k >= 2, 1 <= d <= k-1 and d = k-1 (mod 2); got k=" +
                         std::to_string(k) + " d=" + std::to_string(d));
    if (k > n)
        throw InputError("majority step node index beyond n");
    const double w = posterior_truth_given_diff(p, d);
    const double wrong_if_right = static_cast<double>(k - 1 - d) / 2.0;
    return w * wrong_if_right + (1.0 - w) * (static_cast<double>(n) - wrong_if_right);
}

// Expected wrong count over all n nodes, for every state (i, d). Only the
// reveal region d < delta(i) is stored; the majority region is closed form.
class LossTable {
public:
    LossTable() = default;
    LossTable(double p, std::vector<int> delta, std::vector<std::vector<double>> rows)
        : p_(p), delta_(std::move(delta)), rows_(std::move(rows)) {}

    std::size_t n() const { return delta_.size(); }
    double p() const { return p_; }

    // E(i, d) for 1 <= i <= n+1, 0 <= d <= i-1, d = i-1 (mod 2).
    double at(NodeIndex i, long d) const {
        const std::size_t n = delta_.size();
        if (i < 1 || i > n + 1 || d < 0 || static_cast<std::size_t>(d) > i - 1 ||
            (i - 1 - static_cast<std::size_t>(d)) % 2 != 0)
            throw InputError("no loss-table state (i=" + std::to_string(i) +
                             ", d=" + std::to_string(d) + ")");
        const double w = posterior_truth_given_diff(p_, d);
        const double done = w * static_cast<double>(i - 1 - d) / 2.0 +
                            (1.0 - w) * static_cast<double>(i - 1 + d) / 2.0;
        if (i == n + 1)
            return done;
        double remaining;
        if (d < delta_[i - 1])
            remaining = rows_.at(i - 1).at(static_cast<std::size_t>(d - (i - 1) % 2) / 2);
        else
            remaining = (1.0 - w) * static_cast<double>(n - i + 1);
        return done + remaining;
    }

    // Optimal expected number of wrong nodes, E(1, 0).
    double expected_wrong() const { return at(1, 0); }

    // rows()[i-1][j] = F(i, (i-1)%2 + 2j) for the reveal region of node i.
    const std::vector<std::vector<double>>& rows() const { return rows_; }

    friend bool operator==(const LossTable&, const LossTable&) = default;

private:
    double p_ = 0.0;
    std::vector<int> delta_;
    std::vector<std::vector<double>> rows_;
};

struct CompleteSolution {
    DeltaTable delta;
    LossTable loss;
    double expected_wrong() const { return loss.expected_wrong(); }
};

namespace detail {

class CompleteDp {
public:
    CompleteDp(std::size_t n, double p) : n_(n), p_(p) {
        require_accuracy(p);
        if (n < 1)
            throw InputError("need at least one node");
    }

    // Pr[majority side is wrong | d], cached.
    double wrong_posterior(long d) {
        while (static_cast<long>(wrong_.size()) <= d)
            wrong_.push_back(1.0 - posterior_truth_given_diff(p_, static_cast<long>(wrong_.size())));
        return wrong_[static_cast<std::size_t>(d)];
    }

    double majority_value(std::size_t i, long d) {
        return wrong_posterior(d) * static_cast<double>(n_ - i + 1);
    }

    double reveal_value(long d, double next_up, double next_down) {
        if (d == 0)
            return (1.0 - p_) + next_up;
        const double w = 1.0 - wrong_posterior(d);
        const double q1 = w * p_ + (1.0 - w) * (1.0 - p_);
        return (1.0 - p_) + q1 * next_up + (1.0 - q1) * next_down;
    }

    static bool prefers_reveal(long d, double reveal, double majority) {
        return d == 0 || reveal < majority - kDeltaSlack;
    }

    // F(i+1, x) given the stored row of node i+1 (reveal region only).
    double next_value(std::size_t next, const std::vector<double>& row, int next_delta, long x) {
        if (next == n_ + 1)
            return 0.0;
        if (x < next_delta)
            return row[static_cast<std::size_t>(x - static_cast<long>((next - 1) % 2)) / 2];
        return majority_value(next, x);
    }

    std::size_t n() const { return n_; }
    double p() const { return p_; }

private:
    std::size_t n_;
    double p_;
    std::vector<double> wrong_;
};

// One pass of the threshold sweep. When rows is non-null the reveal-region
// rows are kept for every node.
inline std::vector<int> fast_sweep(std::size_t n, double p, std::vector<std::vector<double>>* rows,
                                   double* expected_wrong) {
    CompleteDp dp(n, p);
    std::vector<int> delta(n, 0);
    if (rows)
        rows->assign(n, {});

    std::vector<double> next_row, row;
    int next_delta = 0;
    for (std::size_t i = n; i >= 1; --i) {
        const long parity = static_cast<long>((i - 1) % 2);
        int di;
        if (i == n) {
            di = static_cast<int>(n % 2);
        } else {
            // Neighbouring thresholds differ by exactly one; test whether node i
            // still reveals at d = delta(i+1).
            const long test = next_delta;
            if (test == 0) {
                di = 1;
            } else {
                const double rev = dp.reveal_value(test, dp.next_value(i + 1, next_row, next_delta, test + 1),
                                                   dp.next_value(i + 1, next_row, next_delta, test - 1));
                di = CompleteDp::prefers_reveal(test, rev, dp.majority_value(i, test)) ? next_delta + 1
                                                                                      : next_delta - 1;
            }
        }
        row.clear();
        for (long d = parity; d < di; d += 2) {
            const double up = dp.next_value(i + 1, next_row, next_delta, d + 1);
            const double down = d > 0 ? dp.next_value(i + 1, next_row, next_delta, d - 1) : up;
            row.push_back(dp.reveal_value(d, up, down));
        }
        // Thresholds beyond the reachable range keep driving the recursion (F
        // only depends on n - i and d) but are reported clamped to i.
        const int reported = std::min(di, static_cast<int>(i));
        delta[i - 1] = reported;
        if (rows)
            (*rows)[i - 1].assign(row.begin(), row.begin() + (reported - parity + 1) / 2);
        std::swap(row, next_row);
        next_delta = di;
        if (i == 1)
            break;
    }
    if (expected_wrong)
        *expected_wrong = next_row.front();
    return delta;
}

} // namespace detail

// Backward sweep over every reachable state: O(n^2) time, O(n) memory.
inline std::pair<DeltaTable, LossTable> compute_delta_quadratic(std::size_t n, double p) {
    detail::CompleteDp dp(n, p);
    std::vector<int> delta(n, 0);
    std::vector<std::vector<double>> rows(n);

    // full[j] = chosen F(i, parity + 2j) for every reachable d of node i.
    std::vector<double> next_full, full;
    int next_delta = 0;
    auto lookup = [&](std::size_t next, long x) {
        if (next == n + 1)
            return 0.0;
        if (x < next_delta)
            return next_full[static_cast<std::size_t>(x - static_cast<long>((next - 1) % 2)) / 2];
        return dp.majority_value(next, x);
    };
    for (std::size_t i = n; i >= 1; --i) {
        const long parity = static_cast<long>((i - 1) % 2);
        full.clear();
        int largest_reveal = -1;
        for (long d = parity; d <= static_cast<long>(i - 1); d += 2) {
            const double up = lookup(i + 1, d + 1);
            const double down = d > 0 ? lookup(i + 1, d - 1) : up;
            const double rev = dp.reveal_value(d, up, down);
            if (d == 0) {
                full.push_back(rev);
                largest_reveal = 0;
                continue;
            }
            const double maj = dp.majority_value(i, d);
            if (detail::CompleteDp::prefers_reveal(d, rev, maj)) {
                full.push_back(rev);
                largest_reveal = static_cast<int>(d);
            } else {
                full.push_back(maj);
            }
        }
        const int di = largest_reveal + 1;
        delta[i - 1] = di;
        rows[i - 1].assign(full.begin(), full.begin() + (di > parity ? (di - parity + 1) / 2 : 0));
        std::swap(full, next_full);
        next_delta = di;
        if (i == 1)
            break;
    }
    DeltaTable table(p, delta);
    return {table, LossTable(p, std::move(delta), std::move(rows))};
}

// Threshold sweep that only touches states with d <= delta(i) + 1.
inline DeltaTable compute_delta_fast(std::size_t n, double p) {
    return DeltaTable(p, detail::fast_sweep(n, p, nullptr, nullptr));
}

// Thresholds plus the loss table, via the fast sweep.
inline CompleteSolution solve_complete(std::size_t n, double p) {
    std::vector<std::vector<double>> rows;
    auto delta = detail::fast_sweep(n, p, &rows, nullptr);
    DeltaTable table(p, delta);
    return {table, LossTable(p, std::move(delta), std::move(rows))};
}

// E(1, 0) of the optimal complete-graph strategy without storing the table.
inline double optimal_complete_expected_wrong(std::size_t n, double p) {
    double e = 0.0;
    detail::fast_sweep(n, p, nullptr, &e);
    return e;
}

enum class NodeParity { odd, even };

// delta_n(i) depends only on the number of nodes after i (and on the parity
// of i, which fixes the parity of reachable diffs). Lookups go to nodes with
// index above max_remaining so that no reported threshold is clamped to the
// reachable range of an early node.
class UniversalDelta {
public:
    UniversalDelta(std::size_t max_remaining, double p)
        : max_remaining_(max_remaining),
          a_(compute_delta_fast(2 * max_remaining + 2, p)),
          b_(compute_delta_fast(2 * max_remaining + 3, p)) {}

    int at(std::size_t remaining, NodeParity parity) const {
        if (remaining > max_remaining_)
            throw InputError("universal delta built for at most " + std::to_string(max_remaining_) +
                             " remaining nodes");
        const std::size_t want = parity == NodeParity::odd ? 1 : 0;
        for (const DeltaTable* t : {&a_, &b_}) {
            const std::size_t i = t->n() - remaining;
            if (i >= 1 && i % 2 == want)
                return t->at(i);
        }
        throw InputError("no node of the requested parity");
    }

private:
    std::size_t max_remaining_;
    DeltaTable a_, b_;
};

inline int universal_delta(std::size_t remaining, NodeParity parity, double p) {
    return UniversalDelta(remaining, p).at(remaining, parity);
}

inline StrategyProfile threshold_strategy(const DeltaTable& table) {
    return StrategyProfile::uniform(ThresholdRule{std::make_shared<const DeltaTable>(table)});
}

// min((1-p) log_{p/(1-p)} n / 2, sqrt(n) / 2).
inline double lower_bound_curve(std::size_t n, double p) {
    require_accuracy(p);
    if (n < 2)
        throw InputError("lower bound curve needs n >= 2");
    const double nn = static_cast<double>(n);
    const double log_term = (1.0 - p) * (std::log(nn) / std::log(p / (1.0 - p))) / 2.0;
    return std::min(log_term, std::sqrt(nn) / 2.0);
}

} // namespace cascade
