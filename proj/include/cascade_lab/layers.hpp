#pragma once
// Layer graphs: nodes split into consecutive layers, each node observing the
// whole previous layer. Under the majority rule a layer reveals fresh signals
// until some layer's signals differ by two or more, after which everybody
// copies.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "cascade_lab/topology.hpp"

namespace cascade {

struct LayerDesign {
    std::vector<std::size_t> sizes;

    static LayerDesign make(std::vector<std::size_t> sizes) {
        if (sizes.empty())
            throw InputError("a layer design needs at least one layer");
        for (std::size_t a : sizes)
            if (a == 0)
                throw InputError("layer sizes must be positive");
        return LayerDesign{std::move(sizes)};
    }

    std::size_t n() const {
        std::size_t t = 0;
        for (std::size_t a : sizes)
            t += a;
        return t;
    }
    std::size_t k() const { return sizes.size(); }

    friend bool operator==(const LayerDesign&, const LayerDesign&) = default;
};

// "12,12,11" style; ";" also separates, as in CSV output.
inline LayerDesign parse_layer_spec(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::size_t pos = 0;
    const std::string trimmed = text.substr(0, text.find_last_not_of(" \t\r\n") + 1);
    if (trimmed.empty())
        throw InputError("layer spec line 1: empty");
    while (pos <= trimmed.size()) {
        const std::size_t comma = std::min(trimmed.find_first_of(",;", pos), trimmed.size());
        const std::string tok = trimmed.substr(pos, comma - pos);
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw InputError("layer spec line 1: empty size at position " + std::to_string(sizes.size() + 1));
        const std::string num = tok.substr(b, e - b + 1);
        if (num.find_first_not_of("0123456789") != std::string::npos)
            throw InputError("layer spec line 1: '" + num + "' is not a positive integer");
        const unsigned long long v = std::stoull(num);
        if (v == 0)
            throw InputError("layer spec line 1: layer sizes must be positive");
        sizes.push_back(static_cast<std::size_t>(v));
        pos = comma + 1;
    }
    return LayerDesign::make(std::move(sizes));
}

inline std::string format_layer_sizes(const LayerDesign& d, char sep = ';') {
    std::string out;
    for (std::size_t k = 0; k < d.sizes.size(); ++k) {
        if (k)
            out += sep;
        out += std::to_string(d.sizes[k]);
    }
    return out;
}

// Layer 1 observes nobody; layer k observes all of layer k-1.
inline Topology build_layer_topology(const LayerDesign& design) { return Topology::layered(design.sizes); }

// Outcome of a layer of independent signals: a wrong cascade (wrong count
// exceeds correct count by two or more), no cascade (|diff| <= 1), or a
// correct cascade.
struct CascadeProbs {
    double wrong = 0.0;
    double none = 0.0;
    double correct = 0.0;
};

namespace detail {

inline double log_binom_pmf(std::size_t a, std::size_t i, double log_p, double log_q) {
    return std::lgamma(static_cast<double>(a) + 1.0) - std::lgamma(static_cast<double>(i) + 1.0) -
           std::lgamma(static_cast<double>(a - i) + 1.0) + static_cast<double>(i) * log_p +
           static_cast<double>(a - i) * log_q;
}

} // namespace detail

inline CascadeProbs cascade_probs(std::size_t a, double p) {
    require_accuracy(p);
    if (a < 1)
        throw InputError("layer size must be positive");
    const double lp = std::log(p), lq = std::log1p(-p);
    auto pmf = [&](std::size_t i) { return std::exp(detail::log_binom_pmf(a, i, lp, lq)); };

    // i counts correct signals. Terms below the mode grow with i, so the sum
    // runs downward and stops once terms are negligible.
    CascadeProbs r;
    if (a >= 2) {
        for (std::size_t i = (a - 2) / 2 + 1; i-- > 0;) {
            const double t = pmf(i);
            r.wrong += t;
            if (t < r.wrong * 1e-18)
                break;
        }
    }
    if (a % 2 == 0)
        r.none = pmf(a / 2);
    else
        r.none = pmf((a - 1) / 2) + pmf((a + 1) / 2);
    r.correct = 1.0 - r.wrong - r.none;
    return r;
}

// s = 1 / (4p(1-p)), the log base of optimal layer sizes.
inline double layer_log_base(double p) {
    require_accuracy(p);
    return 1.0 / (4.0 * p * (1.0 - p));
}

enum class LayerSemantics {
    // An odd layer without a cascade leaves a +-1 diff that is handed to the
    // next layer as one extra signal (of accuracy p).
    carry,
    // Every node sees only the previous layer, exactly as in the built topology.
    strict,
};

inline const char* to_string(LayerSemantics s) { return s == LayerSemantics::strict ? "strict" : "carry"; }

namespace detail {

class CascadeProbCache {
public:
    explicit CascadeProbCache(double p) : p_(p) {}
    const CascadeProbs& operator()(std::size_t a) {
        while (cache_.size() <= a)
            cache_.push_back(cache_.empty() ? CascadeProbs{0.0, 1.0, 0.0} : cascade_probs(cache_.size(), p_));
        return cache_[a];
    }
    double p() const { return p_; }

private:
    double p_;
    std::vector<CascadeProbs> cache_;
};

inline double carry_loss(const LayerDesign& design, CascadeProbCache& probs) {
    const double p = probs.p();
    std::size_t remaining = design.n();
    std::size_t carry = 0;
    double weight = 1.0, total = 0.0;
    for (std::size_t a : design.sizes) {
        remaining -= a;
        const std::size_t effective = a + carry;
        const CascadeProbs& c = probs(effective);
        total += weight * ((1.0 - p) * static_cast<double>(a) + c.wrong * static_cast<double>(remaining));
        weight *= c.none;
        carry = effective % 2;
    }
    return total;
}

// Exact propagation of the distribution of each layer's signed diff.
inline double strict_loss(const LayerDesign& design, double p) {
    const double lp = std::log(p), lq = std::log1p(-p);
    // prev[D + offset] = Pr[previous layer diff = D], truth = 1.
    std::vector<double> prev{1.0};
    long offset = 0;
    double total = 0.0;
    for (std::size_t a : design.sizes) {
        const long al = static_cast<long>(a);
        double fresh = 0.0, copy_right = 0.0, copy_wrong = 0.0;
        for (long j = 0; j < static_cast<long>(prev.size()); ++j) {
            const long d = j - offset;
            if (d >= 2)
                copy_right += prev[static_cast<std::size_t>(j)];
            else if (d <= -2)
                copy_wrong += prev[static_cast<std::size_t>(j)];
            else
                fresh += prev[static_cast<std::size_t>(j)];
        }
        total += copy_wrong * static_cast<double>(a) + fresh * (1.0 - p) * static_cast<double>(a);

        std::vector<double> next(static_cast<std::size_t>(2 * al + 1), 0.0);
        for (std::size_t i = 0; i <= a; ++i)
            next[2 * i] += fresh * std::exp(log_binom_pmf(a, i, lp, lq));
        next[static_cast<std::size_t>(2 * al)] += copy_right;
        next[0] += copy_wrong;
        prev = std::move(next);
        offset = al;
    }
    return total;
}

} // namespace detail

// Exact expected number of wrong nodes under the majority rule.
inline double layer_expected_wrong(const LayerDesign& design, double p, LayerSemantics semantics) {
    require_accuracy(p);
    if (design.sizes.empty())
        throw InputError("empty layer design");
    for (std::size_t a : design.sizes)
        if (a == 0)
            throw InputError("layer sizes must be positive");
    if (semantics == LayerSemantics::strict)
        return detail::strict_loss(design, p);
    detail::CascadeProbCache probs(p);
    return detail::carry_loss(design, probs);
}

// The first-layer trade-off without the second layer's own reveal cost:
// (1-p) a + p_w(a) (n - a).
inline double two_layer_objective(std::size_t a, std::size_t n, double p) {
    if (a < 1 || a > n)
        throw InputError("first layer size must lie in [1, n]");
    const auto c = cascade_probs(a, p);
    return (1.0 - p) * static_cast<double>(a) + c.wrong * static_cast<double>(n - a);
}

// Expected wrong count of the two-layer design [a, n - a].
inline double two_layer_loss(std::size_t a, std::size_t n, double p) {
    if (a < 1 || a > n)
        throw InputError("first layer size must lie in [1, n]");
    const auto c = cascade_probs(a, p);
    return (1.0 - p) * static_cast<double>(a) + (c.wrong + c.none * (1.0 - p)) * static_cast<double>(n - a);
}

struct TwoLayerOptimum {
    std::size_t first_layer = 0;
    double loss = 0.0;
    // log_s n - log_s(log_s n) / 2
    double closed_form = 0.0;
    std::size_t scan_limit = 0;
};

inline double two_layer_closed_form(std::size_t n, double p) {
    const double ls = std::log(layer_log_base(p));
    const double L = std::log(static_cast<double>(n)) / ls;
    return L - (std::log(L) / ls) / 2.0;
}

// Exact argmin of the two-layer loss over a in [1, min(n-1, 8 log_s n)].
inline TwoLayerOptimum optimal_two_layer(std::size_t n, double p) {
    if (n < 3)
        throw InputError("two-layer optimisation needs n >= 3");
    const double L = std::log(static_cast<double>(n)) / std::log(layer_log_base(p));
    TwoLayerOptimum best;
    best.scan_limit = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(8.0 * L)));
    best.loss = std::numeric_limits<double>::infinity();
    for (std::size_t a = 1; a <= best.scan_limit; ++a) {
        const double v = two_layer_loss(a, n, p);
        if (v < best.loss) {
            best.loss = v;
            best.first_layer = a;
        }
    }
    best.closed_form = two_layer_closed_form(n, p);
    return best;
}

struct LayerOptimum {
    LayerDesign design;
    double loss = 0.0;
};

// Exact optimal designs under carry semantics for every size up to
// n_max. OPT_c(m) is the best loss for m real nodes when c in {0, 1} extra
// carried signal joins the first layer:
//   OPT_c(m) = min_a (1-p) a + p_w(a+c) (m-a) + p_n(a+c) OPT_{(a+c) mod 2}(m-a).
// The first-layer search is centred on the optimum for m-1 and widened
// whenever the best candidate sits on the window edge.
class LayerOptimizer {
public:
    struct Options {
        std::size_t window = 3;
        // Also scan every first-layer size and keep the true optimum.
        bool verify_full_scan = false;
    };

    LayerOptimizer(std::size_t n_max, double p) : LayerOptimizer(n_max, p, Options{}) {}

    LayerOptimizer(std::size_t n_max, double p, Options opt) : probs_(p), opt_(opt) {
        require_accuracy(p);
        if (n_max < 1)
            throw InputError("need at least one node");
        if (opt_.window < 1)
            throw InputError("search window must be at least 1");
        for (auto& v : value_)
            v.assign(n_max + 1, 0.0);
        for (auto& a : first_)
            a.assign(n_max + 1, 0);
        for (std::size_t m = 1; m <= n_max; ++m)
            for (std::size_t c = 0; c < 2; ++c)
                solve(m, c);
    }

    std::size_t n_max() const { return value_[0].size() - 1; }

    double loss(std::size_t n) const { return value_[0].at(n); }

    LayerDesign design(std::size_t n) const {
        if (n < 1 || n > n_max())
            throw InputError("no optimum stored for n = " + std::to_string(n));
        std::vector<std::size_t> sizes;
        std::size_t c = 0;
        for (std::size_t m = n; m > 0;) {
            const std::size_t a = first_[c][m];
            sizes.push_back(a);
            c = (a + c) % 2;
            m -= a;
        }
        return LayerDesign::make(std::move(sizes));
    }

    LayerOptimum optimum(std::size_t n) const { return {design(n), loss(n)}; }

    std::size_t window_expansions() const { return expansions_; }
    // Sizes where the window search missed the full-scan optimum (verify mode).
    std::size_t window_misses() const { return misses_; }

private:
    double candidate(std::size_t m, std::size_t c, std::size_t a) {
        const double p = probs_.p();
        const CascadeProbs& cp = probs_(a + c);
        const std::size_t rest = m - a;
        return (1.0 - p) * static_cast<double>(a) + cp.wrong * static_cast<double>(rest) +
               cp.none * value_[(a + c) % 2][rest];
    }

    static bool better(double v, std::size_t a, double best_v, std::size_t best_a) {
        const double tol = 1e-12 * std::max(1.0, std::abs(best_v));
        if (v < best_v - tol)
            return true;
        return v <= best_v + tol && a > best_a;
    }

    void solve(std::size_t m, std::size_t c) {
        const std::size_t centre = m == 1 ? 1 : first_[c][m - 1];
        const std::size_t w = opt_.window;
        std::size_t lo = centre > w ? centre - w : 1;
        std::size_t hi = std::min(m, centre + w);
        double best_v = std::numeric_limits<double>::infinity();
        std::size_t best_a = 0;
        auto scan = [&](std::size_t from, std::size_t to) {
            for (std::size_t a = from; a <= to; ++a) {
                const double v = candidate(m, c, a);
                if (better(v, a, best_v, best_a)) {
                    best_v = v;
                    best_a = a;
                }
            }
        };
        scan(lo, hi);
        for (;;) {
            if (best_a == lo && lo > 1) {
                const std::size_t nlo = lo > w ? lo - w : 1;
                scan(nlo, lo - 1);
                lo = nlo;
                ++expansions_;
            } else if (best_a == hi && hi < m) {
                const std::size_t nhi = std::min(m, hi + w);
                scan(hi + 1, nhi);
                hi = nhi;
                ++expansions_;
            } else {
                break;
            }
        }
        if (opt_.verify_full_scan) {
            const double window_v = best_v;
            scan(1, m);
            if (best_v < window_v - 1e-12 * std::max(1.0, std::abs(window_v)))
                ++misses_;
        }
        value_[c][m] = best_v;
        first_[c][m] = best_a;
    }

    detail::CascadeProbCache probs_;
    Options opt_;
    std::vector<double> value_[2];
    std::vector<std::size_t> first_[2];
    std::size_t expansions_ = 0;
    std::size_t misses_ = 0;
};

inline LayerOptimum optimal_layers_exact(std::size_t n, double p, std::size_t window = 3) {
    LayerOptimizer::Options opt;
    opt.window = window;
    return LayerOptimizer(n, p, opt).optimum(n);
}

// Layer sizes from the asymptotic structure: the first layer has
// round(log_s n) nodes and each later layer shrinks by one for every factor
// of s by which the number of remaining nodes has fallen, i.e. a layer is
// sized by log_s of the nodes still to be placed. The last layer takes what
// is left.
inline LayerDesign asymptotic_layers(std::size_t n, double p) {
    const double ls = std::log(layer_log_base(p));
    const double L = std::log(static_cast<double>(n)) / ls;
    if (!(L >= 2.0))
        throw InputError("asymptotic layers need log_s n >= 2 (n = " + std::to_string(n) + ")");
    const long first = std::lround(L);
    std::vector<std::size_t> sizes;
    std::size_t remaining = n;
    while (remaining > 0) {
        const double drop = std::floor(std::log(static_cast<double>(n) / static_cast<double>(remaining)) / ls);
        long a = first - static_cast<long>(drop);
        a = std::max(a, 1L);
        const std::size_t size = std::min(static_cast<std::size_t>(a), remaining);
        sizes.push_back(size);
        remaining -= size;
    }
    return LayerDesign::make(std::move(sizes));
}

} // namespace cascade
