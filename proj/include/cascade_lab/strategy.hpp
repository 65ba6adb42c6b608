#pragma once
// Decision rules. A rule maps what node i observes (the decisions and
// validity flags of its earlier neighbours) plus its own signal to a bit.
// Built-in rules only need vote tallies; custom rules see the raw
// observation.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cascade_lab/types.hpp"

namespace cascade {

// Reveal thresholds of the optimal complete-graph strategy: node i reveals
// its signal iff |valid diff| < delta(i), otherwise it follows the majority.
class DeltaTable {
public:
    DeltaTable() = default;
    DeltaTable(double p, std::vector<int> delta) : p_(p), delta_(std::move(delta)) {}

    std::size_t n() const { return delta_.size(); }
    double p() const { return p_; }

    // 1-based.
    int at(NodeIndex i) const {
        if (i < 1 || i > delta_.size())
            throw InputError("delta table has no entry for node " + std::to_string(i));
        return delta_[i - 1];
    }

    const std::vector<int>& values() const { return delta_; }

    friend bool operator==(const DeltaTable&, const DeltaTable&) = default;

private:
    double p_ = 0.0;
    std::vector<int> delta_;
};

// What node i sees: one entry per earlier neighbour, in increasing index order.
struct Observation {
    NodeIndex node = 1;
    std::span<const Bit> decisions;
    std::span<const std::uint8_t> valid;
};

struct MajorityRule {};
struct AlwaysReveal {};
struct ThresholdRule {
    std::shared_ptr<const DeltaTable> table;
};
using CustomRule = std::function<Bit(const Observation&, Bit signal)>;

using Rule = std::variant<MajorityRule, AlwaysReveal, ThresholdRule, CustomRule>;

inline bool is_custom(const Rule& r) { return std::holds_alternative<CustomRule>(r); }

class StrategyProfile {
public:
    StrategyProfile() : rules_{MajorityRule{}} {}

    static StrategyProfile uniform(Rule r) {
        StrategyProfile s;
        s.rules_ = {std::move(r)};
        s.uniform_ = true;
        s.validate();
        return s;
    }

    // rules[i-1] is the rule of node i.
    static StrategyProfile per_node(std::vector<Rule> rules) {
        if (rules.empty())
            throw InputError("a per-node strategy profile needs at least one rule");
        StrategyProfile s;
        s.rules_ = std::move(rules);
        s.uniform_ = false;
        s.validate();
        return s;
    }

    const Rule& rule_for(NodeIndex i) const { return uniform_ ? rules_.front() : rules_.at(i - 1); }

    bool any_custom() const {
        for (const auto& r : rules_)
            if (is_custom(r))
                return true;
        return false;
    }

    // Throws unless every node 1..n has a rule and every threshold table covers n.
    void check_covers(std::size_t n) const {
        if (!uniform_ && rules_.size() < n)
            throw InputError("strategy profile covers " + std::to_string(rules_.size()) +
                             " nodes, topology has " + std::to_string(n));
        for (const auto& r : rules_)
            if (const auto* t = std::get_if<ThresholdRule>(&r); t && t->table->n() < n)
                throw InputError("delta table covers " + std::to_string(t->table->n()) +
                                 " nodes, topology has " + std::to_string(n));
    }

private:
    void validate() const {
        for (const auto& r : rules_) {
            if (const auto* t = std::get_if<ThresholdRule>(&r); t && !t->table)
                throw InputError("threshold rule without a delta table");
            if (const auto* c = std::get_if<CustomRule>(&r); c && !*c)
                throw InputError("empty custom rule");
        }
    }

    std::vector<Rule> rules_;
    bool uniform_ = true;
};

// Count of ones minus count of zeros.
inline long signed_diff(std::span<const Bit> bits) {
    long d = 0;
    for (Bit b : bits)
        d += b ? 1 : -1;
    return d;
}

// Strict majority of votes plus own signal; a tie returns the own signal.
inline Bit majority_decide(std::span<const Bit> votes, Bit own_signal) {
    const long d = signed_diff(votes) + (own_signal ? 1 : -1);
    if (d > 0)
        return 1;
    if (d < 0)
        return 0;
    return own_signal;
}

// Pr[b = 1 | signed diff of independent valid signals = d].
inline double posterior_truth_given_diff(double p, long d) {
    return 1.0 / (1.0 + std::exp(static_cast<double>(d) * std::log((1.0 - p) / p)));
}

namespace detail {

// Decisions and validity of the observed neighbours, reduced to counts.
struct Tally {
    long ones = 0;
    long zeros = 0;
    long valid_ones = 0;
    long valid_zeros = 0;

    long diff() const { return ones - zeros; }
    long valid_diff() const { return valid_ones - valid_zeros; }
};

inline Tally tally_of(const Observation& obs) {
    Tally t;
    for (std::size_t k = 0; k < obs.decisions.size(); ++k) {
        const bool v = k < obs.valid.size() && obs.valid[k];
        if (obs.decisions[k]) {
            ++t.ones;
            t.valid_ones += v;
        } else {
            ++t.zeros;
            t.valid_zeros += v;
        }
    }
    return t;
}

inline Bit majority_from_diff(long diff, Bit own_signal) {
    if (diff > 0)
        return 1;
    if (diff < 0)
        return 0;
    return own_signal;
}

// Output of a built-in rule for both signal values: {out(0), out(1)}.
struct Response {
    Bit on_zero;
    Bit on_one;
    bool revealing() const { return on_zero == 0 && on_one == 1; }
    Bit operator()(Bit s) const { return s ? on_one : on_zero; }
};

inline Response respond_builtin(const Rule& rule, NodeIndex node, const Tally& t) {
    if (std::holds_alternative<AlwaysReveal>(rule))
        return {0, 1};
    if (std::holds_alternative<MajorityRule>(rule)) {
        const long d = t.diff();
        return {majority_from_diff(d - 1, 0), majority_from_diff(d + 1, 1)};
    }
    const auto& th = std::get<ThresholdRule>(rule);
    if (std::labs(t.valid_diff()) < th.table->at(node))
        return {0, 1};
    return {majority_from_diff(t.diff(), 0), majority_from_diff(t.diff(), 1)};
}

inline Response respond(const Rule& rule, const Observation& obs) {
    if (const auto* c = std::get_if<CustomRule>(&rule))
        return {static_cast<Bit>((*c)(obs, 0) & 1), static_cast<Bit>((*c)(obs, 1) & 1)};
    return respond_builtin(rule, obs.node, tally_of(obs));
}

} // namespace detail

inline Bit decide(const Rule& rule, const Observation& obs, Bit own_signal) {
    return detail::respond(rule, obs)(own_signal);
}

// True iff the rule passes the own signal through for both signal values
// given this observation.
inline bool is_revealing(const Rule& rule, const Observation& obs) {
    return detail::respond(rule, obs).revealing();
}

} // namespace cascade
