#pragma once
// Command implementations behind the cascade_lab tool. Each command takes a
// RunConfig and returns the text it would print, so the output can be
// checked without spawning a process.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cascade_lab/compare.hpp"
#include "cascade_lab/complete_opt.hpp"
#include "cascade_lab/exact_oracle.hpp"
#include "cascade_lab/layers.hpp"
#include "cascade_lab/random_graph.hpp"
#include "cascade_lab/simulator.hpp"

namespace cascade::cli {

// Above this many nodes the oracle enumerates in double precision.
inline constexpr std::size_t kExactRationalNodes = 12;

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// Value of x as it would appear in a CSV cell.
inline double rounded(double x) { return std::strtod(fmt(x).c_str(), nullptr); }

struct Probability {
    double value = 0.0;
    Rational exact;
    std::string text;
};

// "0.75", "2/3" or "3e-1"; decimal strings are read exactly as well.
inline Probability parse_probability(const std::string& text) {
    auto bad = [&]() -> InputError { return InputError("invalid probability '" + text + "'"); };
    if (text.empty())
        throw bad();
    Probability out;
    out.text = text;
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
            if (a.empty() || b.empty() || a.find_first_not_of("0123456789") != std::string::npos ||
                b.find_first_not_of("0123456789") != std::string::npos)
                throw bad();
            auto strip = [](std::string v) { return v.erase(0, std::min(v.find_first_not_of('0'), v.size() - 1)); };
            const boost::multiprecision::cpp_int num(strip(a)), den(strip(b));
            if (den == 0)
                throw bad();
            out.exact = Rational(num, den);
        } else {
            std::size_t used = 0;
            (void)std::stod(text, &used);
            if (used != text.size())
                throw bad();
            // Exact value of the decimal literal.
            std::string mant = text, exp_part;
            if (auto e = text.find_first_of("eE"); e != std::string::npos) {
                mant = text.substr(0, e);
                exp_part = text.substr(e + 1);
            }
            long exp10 = exp_part.empty() ? 0 : std::stol(exp_part);
            bool neg = false;
            if (!mant.empty() && (mant[0] == '+' || mant[0] == '-')) {
                neg = mant[0] == '-';
                mant.erase(0, 1);
            }
            if (auto dot = mant.find('.'); dot != std::string::npos) {
                exp10 -= static_cast<long>(mant.size() - dot - 1);
                mant.erase(dot, 1);
            }
            if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos)
                throw bad();
            // cpp_int reads a leading zero as an octal prefix.
            mant.erase(0, std::min(mant.find_first_not_of('0'), mant.size() - 1));
            boost::multiprecision::cpp_int num(mant), scale = 1;
            for (long k = 0; k < std::labs(exp10); ++k)
                scale *= 10;
            out.exact = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
            if (neg)
                out.exact = -out.exact;
        }
    } catch (const InputError&) {
        throw;
    } catch (const std::exception&) {
        throw bad();
    }
    out.value = static_cast<double>(out.exact);
    require_accuracy(out.value);
    return out;
}

struct RunConfig {
    std::string subcommand;
    std::vector<std::size_t> n;
    std::string p = "2/3";
    std::size_t reps = 1000;
    std::optional<std::uint64_t> seed;
    bool ci = false;
    std::string topology = "complete";
    std::string strategy = "maj";
    std::vector<double> q_grid;
    bool fixed_graph = false;
    std::string mode = "exact";
    std::string semantics = "carry";
    std::size_t window = 3;
    std::size_t sweep_reps = 0;
    unsigned workers = 0;
};

inline void validate(const RunConfig& c) {
    for (std::size_t n : c.n)
        if (n < 1)
            throw InputError("--n must be at least 1");
    if (c.reps < 1)
        throw InputError("--reps must be at least 1");
    for (double q : c.q_grid)
        if (!(q >= 0.0 && q <= 1.0))
            throw InputError("q values must lie in [0, 1]");
    (void)parse_probability(c.p);
}

inline std::uint64_t resolve_seed(const RunConfig& c) {
    if (c.seed)
        return *c.seed;
    if (c.ci)
        throw InputError("--ci requires an explicit --seed");
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A layer file holds one line of comma-separated sizes.
inline LayerDesign read_layer_file(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line, first;
    std::size_t lineno = 0, used = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (++used > 1)
            throw InputError("layer spec line " + std::to_string(lineno) + ": expected a single line of sizes");
        first = line;
    }
    if (used == 0)
        throw InputError("layer spec line 1: empty");
    return parse_layer_spec(first);
}

namespace detail {

inline std::size_t single_n(const RunConfig& c) {
    if (c.n.empty())
        throw InputError("--n is required");
    if (c.n.size() > 1)
        throw InputError("this command takes a single --n");
    return c.n.front();
}

inline std::optional<std::size_t> optional_n(const RunConfig& c) {
    if (c.n.size() > 1)
        throw InputError("this command takes a single --n");
    if (c.n.empty())
        return std::nullopt;
    return c.n.front();
}

inline bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

struct ResolvedTopology {
    TopologySource source;
    std::size_t n = 0;
};

inline ResolvedTopology resolve_topology(const RunConfig& c) {
    const std::string& t = c.topology;
    auto check_n = [&](std::size_t from_file) {
        if (auto n = optional_n(c); n && *n != from_file)
            throw InputError("--n " + std::to_string(*n) + " does not match the " + std::to_string(from_file) +
                             " nodes in '" + t + "'");
        return from_file;
    };
    if (t == "empty") {
        const std::size_t n = single_n(c);
        return {EmptySource{n}, n};
    }
    if (t == "complete") {
        const std::size_t n = single_n(c);
        return {CompleteSource{n}, n};
    }
    if (starts_with(t, "gnq:")) {
        const std::string qs = t.substr(4);
        std::size_t used = 0;
        double q = 0.0;
        try {
            q = std::stod(qs, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (qs.empty() || used != qs.size() || !(q >= 0.0 && q <= 1.0))
            throw InputError("invalid connection probability in '" + t + "'");
        const std::size_t n = single_n(c);
        return {GnqSource{n, q}, n};
    }
    if (starts_with(t, "layers:")) {
        LayerDesign d = read_layer_file(t.substr(7));
        const std::size_t n = check_n(d.n());
        return {LayersSource{std::move(d)}, n};
    }
    if (starts_with(t, "edges:")) {
        auto g = std::make_shared<const Topology>(parse_edge_list(read_file(t.substr(6))));
        const std::size_t n = check_n(g->size());
        return {FixedSource{std::move(g)}, n};
    }
    throw InputError("unknown topology '" + t + "' (expected empty, complete, gnq:<q>, layers:<file> or edges:<file>)");
}

inline StrategyProfile resolve_strategy(const std::string& s, std::size_t n, double p) {
    if (s == "maj")
        return StrategyProfile::uniform(MajorityRule{});
    if (s == "reveal")
        return StrategyProfile::uniform(AlwaysReveal{});
    if (s == "opt")
        return threshold_strategy(compute_delta_fast(n, p));
    throw InputError("unknown strategy '" + s + "' (expected maj, reveal or opt)");
}

inline LayerSemantics resolve_semantics(const std::string& s) {
    if (s == "carry")
        return LayerSemantics::carry;
    if (s == "strict")
        return LayerSemantics::strict;
    throw InputError("unknown semantics '" + s + "' (expected carry or strict)");
}

inline const char* kSimHeader = "topology,strategy,n,p,mean_wrong,ci95,reps,seed\n";

inline std::string sim_row(const std::string& topo, const std::string& strat, std::size_t n, double p,
                           const WrongCountEstimate& e) {
    return topo + "," + strat + "," + std::to_string(n) + "," + fmt(p) + "," + fmt(e.mean) + "," +
           fmt(e.ci95_halfwidth) + "," + std::to_string(e.reps) + "," + std::to_string(e.master_seed) + "\n";
}

} // namespace detail

inline std::string cmd_sim(const RunConfig& c) {
    validate(c);
    const Probability p = parse_probability(c.p);
    const auto topo = detail::resolve_topology(c);
    const auto profile = detail::resolve_strategy(c.strategy, topo.n, p.value);
    const std::uint64_t seed = resolve_seed(c);
    SimOptions opt;
    opt.workers = c.workers;
    const auto est = estimate_expected_wrong(topo.source, profile, p.value, std::max<std::size_t>(c.reps, 2), seed, opt);
    return std::string(detail::kSimHeader) + detail::sim_row(c.topology, c.strategy, topo.n, p.value, est);
}

inline std::string cmd_sweep_q(const RunConfig& c) {
    validate(c);
    if (c.n.empty())
        throw InputError("--n is required");
    const Probability p = parse_probability(c.p);
    const std::uint64_t seed = resolve_seed(c);
    SweepOptions opt;
    opt.sim.workers = c.workers;
    opt.fixed_graph = c.fixed_graph;
    std::string out = "n,q,mean_wrong,ci95,reps,seed\n";
    for (std::size_t k = 0; k < c.n.size(); ++k) {
        const std::size_t n = c.n[k];
        const auto grid = c.q_grid.empty() ? default_q_grid(n) : c.q_grid;
        // Each n gets its own stream so adding sizes leaves earlier rows unchanged.
        const std::uint64_t n_seed = k == 0 ? seed : substream_seed(seed, 1u << 20 | k);
        for (const SweepRow& r : sweep_q(n, p.value, grid, std::max<std::size_t>(c.reps, 2), n_seed, opt))
            out += std::to_string(r.n) + "," + fmt(r.q) + "," + fmt(r.estimate.mean) + "," +
                   fmt(r.estimate.ci95_halfwidth) + "," + std::to_string(r.estimate.reps) + "," +
                   std::to_string(seed) + "\n";
    }
    return out;
}

inline std::string cmd_delta(const RunConfig& c) {
    validate(c);
    const std::size_t n = detail::single_n(c);
    const Probability p = parse_probability(c.p);
    const DeltaTable t = compute_delta_fast(n, p.value);
    std::string out = "i,delta\n";
    for (std::size_t i = 1; i <= n; ++i)
        out += std::to_string(i) + "," + std::to_string(t.at(i)) + "\n";
    return out;
}

inline std::string cmd_opt_complete(const RunConfig& c) {
    validate(c);
    const Probability p = parse_probability(c.p);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t n : c.n) {
        nlohmann::ordered_json j;
        j["n"] = n;
        j["p"] = rounded(p.value);
        j["expected_wrong"] = rounded(optimal_complete_expected_wrong(n, p.value));
        if (n >= 2)
            j["lower_bound"] = rounded(lower_bound_curve(n, p.value));
        else
            j["lower_bound"] = nullptr;
        rows.push_back(std::move(j));
    }
    if (rows.empty())
        throw InputError("--n is required");
    return (rows.size() == 1 ? rows.front() : rows).dump(2) + "\n";
}

inline std::string cmd_layers_opt(const RunConfig& c) {
    validate(c);
    if (c.n.empty())
        throw InputError("--n is required");
    const Probability p = parse_probability(c.p);
    const LayerSemantics sem = detail::resolve_semantics(c.semantics);
    std::vector<std::string> modes;
    if (c.mode == "all")
        modes = {"exact", "asymptotic", "two-layer"};
    else if (c.mode == "exact" || c.mode == "asymptotic" || c.mode == "two-layer")
        modes = {c.mode};
    else
        throw InputError("unknown mode '" + c.mode + "' (expected exact, asymptotic, two-layer or all)");

    std::optional<LayerOptimizer> exact;
    std::string out = "n,p,mode,k,loss,sizes\n";
    for (std::size_t n : c.n) {
        for (const std::string& mode : modes) {
            LayerDesign d;
            if (mode == "exact") {
                const std::size_t n_max = *std::max_element(c.n.begin(), c.n.end());
                if (!exact) {
                    LayerOptimizer::Options o;
                    o.window = c.window;
                    exact.emplace(n_max, p.value, o);
                }
                d = exact->design(n);
            } else if (mode == "asymptotic") {
                d = asymptotic_layers(n, p.value);
            } else {
                const auto best = optimal_two_layer(n, p.value);
                d = LayerDesign::make({best.first_layer, n - best.first_layer});
            }
            const double loss = mode == "exact" && sem == LayerSemantics::carry
                                    ? exact->loss(n)
                                    : layer_expected_wrong(d, p.value, sem);
            out += std::to_string(n) + "," + fmt(p.value) + "," + mode + "," + std::to_string(d.k()) + "," +
                   fmt(loss) + "," + format_layer_sizes(d) + "\n";
        }
    }
    return out;
}

inline std::string cmd_compare(const RunConfig& c) {
    validate(c);
    const std::size_t n = detail::single_n(c);
    const Probability p = parse_probability(c.p);
    const std::uint64_t seed = resolve_seed(c);
    CompareOptions opt;
    opt.sim.workers = c.workers;
    opt.sweep_reps = c.sweep_reps;
    std::string out = detail::kSimHeader;
    for (const auto& r : compare_topologies(n, p.value, std::max<std::size_t>(c.reps, 2), seed, opt))
        out += detail::sim_row(r.topology, r.strategy, r.n, r.p, r.estimate);
    return out;
}

// Exhaustive optimum on the complete graph (strategy "best"), or the exact
// loss of a built-in strategy on a fixed topology. Small instances are
// computed in exact rational arithmetic.
inline std::string cmd_oracle(const RunConfig& c) {
    validate(c);
    const Probability p = parse_probability(c.p);
    nlohmann::ordered_json j;
    if (c.strategy == "best") {
        const std::size_t n = detail::single_n(c);
        if (c.topology != "complete")
            throw InputError("the exhaustive search only covers the complete graph");
        const auto r = exhaustive_optimal_complete<Rational>(n, p.exact);
        j["n"] = n;
        j["p"] = p.text;
        j["strategy"] = "best";
        j["expected_wrong"] = rounded(static_cast<double>(r.loss.expected_wrong));
        j["expected_wrong_exact"] = r.loss.expected_wrong.str();
        nlohmann::ordered_json actions = nlohmann::ordered_json::object();
        for (const auto& [history, action] : r.actions)
            actions[history.empty() ? "-" : history] = to_string(action);
        j["reveal_or_majority"] = has_reveal_or_majority_shape(r);
        j["actions"] = std::move(actions);
        return j.dump(2) + "\n";
    }
    const auto topo = detail::resolve_topology(c);
    Topology g;
    if (const auto* f = std::get_if<FixedSource>(&topo.source))
        g = *f->topology;
    else if (const auto* l = std::get_if<LayersSource>(&topo.source))
        g = build_layer_topology(l->design);
    else if (std::holds_alternative<EmptySource>(topo.source))
        g = Topology::empty(topo.n);
    else if (std::holds_alternative<CompleteSource>(topo.source))
        g = Topology::complete(topo.n);
    else
        throw InputError("the oracle needs a fixed topology, not '" + c.topology + "'");
    if (g.size() > kMaxEnumerationNodes)
        throw CapacityError("exact enumeration supports at most " + std::to_string(kMaxEnumerationNodes) +
                            " nodes, got " + std::to_string(g.size()));
    const auto profile = detail::resolve_strategy(c.strategy, g.size(), p.value);
    j["n"] = g.size();
    j["p"] = p.text;
    j["topology"] = c.topology;
    j["strategy"] = c.strategy;
    nlohmann::ordered_json per_node = nlohmann::ordered_json::array();
    if (g.size() <= kExactRationalNodes) {
        const auto probs = failure_probs<Rational>(g, profile, p.exact);
        Rational total = 0;
        for (const auto& x : probs)
            total += x;
        j["expected_wrong"] = rounded(static_cast<double>(total));
        j["expected_wrong_exact"] = total.str();
        for (const auto& x : probs)
            per_node.push_back(rounded(static_cast<double>(x)));
    } else {
        const auto probs = failure_probs<double>(g, profile, p.value);
        double total = 0;
        for (double x : probs)
            total += x;
        j["expected_wrong"] = rounded(total);
        for (double x : probs)
            per_node.push_back(rounded(x));
    }
    j["failure_probs"] = std::move(per_node);
    return j.dump(2) + "\n";
}

inline std::string run(const RunConfig& c) {
    if (c.subcommand == "sim")
        return cmd_sim(c);
    if (c.subcommand == "sweep-q")
        return cmd_sweep_q(c);
    if (c.subcommand == "delta")
        return cmd_delta(c);
    if (c.subcommand == "opt-complete")
        return cmd_opt_complete(c);
    if (c.subcommand == "layers-opt")
        return cmd_layers_opt(c);
    if (c.subcommand == "compare")
        return cmd_compare(c);
    if (c.subcommand == "oracle")
        return cmd_oracle(c);
    throw InputError("unknown subcommand '" + c.subcommand + "'");
}

} // namespace cascade::cli
