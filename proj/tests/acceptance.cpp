// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//   acceptance [criterion...]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cascade_lab.hpp"

using namespace cascade;

namespace {

constexpr double kTwoThirds = 2.0 / 3;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back((ok ? "ok: " : "FAILED: ") + what);
    }
};

std::string num(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StrategyProfile majority() { return StrategyProfile::uniform(MajorityRule{}); }

double ruin_limit(double p) { return (1 - p) * (1 - p) / (p * p + (1 - p) * (1 - p)); }

// 1. corner-case anchors
Outcome anchors() {
    Outcome o;
    const auto complete = estimate_expected_wrong(CompleteSource{1000}, majority(), kTwoThirds, 100000, 1);
    o.check(std::abs(complete.mean / 1000 - 0.2) <= 0.01,
            "complete n=1000 p=2/3: wrong fraction " + num(complete.mean / 1000, 5) + " (target 0.200 +- 0.01)");
    const auto empty = estimate_expected_wrong(EmptySource{1000}, majority(), kTwoThirds, 20000, 2);
    o.check(std::abs(empty.mean / 1000 - 1.0 / 3) <= 0.005,
            "empty n=1000: wrong fraction " + num(empty.mean / 1000, 5) + " (target 0.333 +- 0.005)");
    std::uint64_t seed = 3;
    for (double p : {0.6, 0.75}) {
        const auto e = estimate_expected_wrong(CompleteSource{1000}, majority(), p, 40000, seed++);
        o.check(std::abs(e.mean / 1000 - ruin_limit(p)) <= 0.01,
                "complete p=" + num(p) + ": " + num(e.mean / 1000, 5) + " vs " + num(ruin_limit(p), 5));
    }
    return o;
}

// 2. U-shape of the q sweep
Outcome u_shape() {
    Outcome o;
    std::vector<double> q_scaled, min_scaled;
    std::uint64_t seed = 20;
    for (std::size_t n : {1u << 10, 1u << 12, 1u << 14}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto rows = sweep_q(n, kTwoThirds, default_q_grid(n), 1000, seed++);
        const auto best = std::min_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
            return a.estimate.mean < b.estimate.mean;
        });
        const auto& m = best->estimate;
        const auto& lo = rows.front().estimate;
        const auto& hi = rows.back().estimate;
        const bool below = m.mean + 3 * (m.ci95_halfwidth + lo.ci95_halfwidth) <= lo.mean &&
                           m.mean + 3 * (m.ci95_halfwidth + hi.ci95_halfwidth) <= hi.mean;
        const double ln = std::log(static_cast<double>(n));
        q_scaled.push_back(best->q * ln);
        min_scaled.push_back(m.mean / ln);
        o.check(below, "n=" + std::to_string(n) + ": min " + num(m.mean) + " +- " + num(m.ci95_halfwidth) +
                           " at q=" + num(best->q) + ", endpoints " + num(lo.mean) + " / " + num(hi.mean) + " (" +
                           num(seconds_since(t0), 3) + " s)");
    }
    auto width = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    };
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (double x : v)
            s += (s.empty() ? "" : ", ") + num(x);
        return s;
    };
    o.check(width(q_scaled) <= 3, "argmin q * ln n = {" + list(q_scaled) + "}, width " + num(width(q_scaled)));
    o.check(width(min_scaled) <= 3, "min / ln n = {" + list(min_scaled) + "}, width " + num(width(min_scaled)));
    return o;
}

bool bound3_and_end(const DeltaTable& t) {
    const auto& d = t.values();
    if (d.back() != static_cast<int>(d.size() % 2))
        return false;
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if (d[i] < d[i + 1] - 1 || d[i] > d[i + 1] + 1)
            return false;
    return true;
}

// 3. DP correctness
Outcome dp_correctness() {
    Outcome o;
    const std::array<double, 4> ps{0.6, kTwoThirds, 0.75, 0.9};
    double worst = 0;
    for (double p : ps)
        for (std::size_t n = 1; n <= 10; ++n) {
            const double oracle = exhaustive_optimal_complete<double>(n, p).loss.expected_wrong;
            worst = std::max(worst, std::abs(compute_delta_quadratic(n, p).second.expected_wrong() - oracle));
        }
    o.check(worst <= 1e-9, "quadratic DP vs exhaustive search, n <= 10: max |diff| = " + num(worst));

    std::vector<std::size_t> sizes;
    for (std::size_t n = 1; n <= 300; ++n)
        sizes.push_back(n);
    for (std::size_t n : {511u, 1000u, 2048u, 4097u, 9999u, 10000u})
        sizes.push_back(n);
    std::size_t tables = 0, identical = 0, bound_ok = 0;
    for (double p : ps)
        for (std::size_t n : sizes) {
            const auto [qd, ql] = compute_delta_quadratic(n, p);
            const auto fast = solve_complete(n, p);
            ++tables;
            identical += fast.delta == qd && fast.loss == ql && compute_delta_fast(n, p) == qd;
            bound_ok += bound3_and_end(qd);
        }
    o.check(identical == tables, "fast vs quadratic tables byte-identical: " + std::to_string(identical) + "/" +
                                     std::to_string(tables) + " (n = 1..300 and 511..10000, 4 values of p)");
    o.check(bound_ok == tables, "neighbour bound and delta(n) = n mod 2: " + std::to_string(bound_ok) + "/" +
                                    std::to_string(tables));

    const auto t0 = std::chrono::steady_clock::now();
    const DeltaTable big = compute_delta_fast(1000000, kTwoThirds);
    const double secs = seconds_since(t0);
    o.check(secs <= 10.0 && bound3_and_end(big),
            "compute_delta_fast n=1e6: " + num(secs, 3) + " s, bounds " + (bound3_and_end(big) ? "hold" : "violated"));
    return o;
}

// 4. lower bound and logarithmic growth
Outcome lower_bound() {
    Outcome o;
    std::vector<double> ratio;
    bool above = true;
    std::string detail;
    for (int k = 10; k <= 20; ++k) {
        const std::size_t n = std::size_t{1} << k;
        const double e = optimal_complete_expected_wrong(n, kTwoThirds);
        const double lb = lower_bound_curve(n, kTwoThirds);
        above = above && e >= lb;
        ratio.push_back(e / std::log(static_cast<double>(n)));
        if (k == 10 || k == 15 || k == 20)
            detail += " n=2^" + std::to_string(k) + ": E=" + num(e) + " bound=" + num(lb) + ";";
    }
    o.check(above, "E(1,0) >= lower bound for n = 2^10..2^20;" + detail);
    const double w = *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
    o.check(w <= 2, "E / ln n in [" + num(*std::min_element(ratio.begin(), ratio.end())) + ", " +
                        num(*std::max_element(ratio.begin(), ratio.end())) + "], width " + num(w));
    return o;
}

void for_each_composition(std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& f) {
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t left) {
        if (left == 0) {
            f(cur);
            return;
        }
        for (std::size_t a = 1; a <= left; ++a) {
            cur.push_back(a);
            rec(left - a);
            cur.pop_back();
        }
    };
    rec(n);
}

// 5. layer machinery
Outcome layers() {
    Outcome o;
    const LayerOptimizer opt(20, kTwoThirds);
    double worst = 0;
    for (std::size_t n = 1; n <= 20; ++n) {
        double best = std::numeric_limits<double>::infinity();
        for_each_composition(n, [&](const std::vector<std::size_t>& sizes) {
            best = std::min(best, layer_expected_wrong(LayerDesign{sizes}, kTwoThirds, LayerSemantics::carry));
        });
        worst = std::max(worst, std::abs(opt.loss(n) - best));
    }
    o.check(worst <= 1e-12, "exact layers vs all compositions, n <= 20: max |diff| = " + num(worst));

    const auto two = optimal_two_layer(100000, 0.75);
    o.check(std::abs(static_cast<double>(two.first_layer) - two.closed_form) <= 3,
            "two-layer argmin at n=1e5, p=3/4: a1 = " + std::to_string(two.first_layer) + " (loss " +
                num(two.loss) + "), closed form " + num(two.closed_form, 4) + ", loss there " +
                num(two_layer_loss(static_cast<std::size_t>(std::lround(two.closed_form)), 100000, 0.75)));

    bool structure = true;
    std::string sample;
    for (double p : {0.6, kTwoThirds, 0.75, 0.9})
        for (std::size_t n : {100u, 1000u, 100000u, 1000000u}) {
            const double L = std::log(static_cast<double>(n)) / std::log(layer_log_base(p));
            if (L < 2)
                continue;
            const auto d = asymptotic_layers(n, p);
            // a single layer when log_s n exceeds n
            const std::size_t a1 = std::min(n, static_cast<std::size_t>(std::lround(L)));
            structure = structure && d.n() == n && d.sizes.front() == a1 &&
                        std::is_sorted(d.sizes.rbegin(), d.sizes.rend());
            if (p == 0.75 && n == 100000)
                sample = "n=1e5 p=3/4: k=" + std::to_string(d.k()) + " a1=" + std::to_string(d.sizes.front());
        }
    o.check(structure, "asymptotic designs non-increasing with a1 = min(round(log_s n), n); " + sample);

    const std::vector<std::vector<std::size_t>> designs{{2, 1}, {3, 3, 5}, {4, 6, 2, 9}, {5, 7, 288}, {9, 8, 7, 9976}};
    std::uint64_t seed = 50;
    for (const auto& sizes : designs) {
        const auto d = LayerDesign::make(sizes);
        const double exact = layer_expected_wrong(d, kTwoThirds, LayerSemantics::strict);
        const auto e = estimate_expected_wrong(LayersSource{d}, majority(), kTwoThirds,
                                               d.n() > 1000 ? 10000 : 100000, seed++);
        const double z = std::abs(e.mean - exact) / e.standard_error();
        o.check(z <= 3, "strict loss " + format_layer_sizes(d) + ": analytic " + num(exact, 6) + ", MC " +
                            num(e.mean, 6) + " (" + num(z, 3) + " SE)");
    }
    return o;
}

// 6. bound harnesses
Outcome bounds() {
    Outcome o;
    const std::vector<std::pair<std::size_t, double>> points{{50, 0.1}, {100, 0.1}, {200, 0.05}, {400, 0.02}};
    std::size_t held = 0, total = 0;
    double slack = 1;
    std::uint64_t seed = 600;
    for (double f : {0.6, 0.75, 0.9})
        for (const auto& [i, q] : points) {
            const auto e = forced_prefix_failure(1000, q, kTwoThirds, {i, f}, 100000, seed++);
            const double b = exponential_bound(i, q, f);
            ++total;
            held += e.mean <= b + 3 * e.ci95_halfwidth;
            slack = std::min(slack, b - e.mean);
        }
    o.check(held == total, "exponential bound, 12-point grid: " + std::to_string(held) + "/" +
                               std::to_string(total) + " hold, smallest margin " + num(slack));

    held = total = 0;
    double worst = 0;
    const std::vector<std::pair<std::size_t, double>> grid2{{10, 0.05}, {10, 0.5}, {50, 0.1}, {200, 0.02}, {30, 0.9}};
    for (double p : {0.6, kTwoThirds, 0.75, 0.9}) {
        const double f0 = std::ceil(std::sqrt(p) / (std::sqrt(p) + std::sqrt(1 - p)) * 100) / 100;
        for (double f : {f0, 0.8, 0.95})
            for (const auto& [i, q] : grid2) {
                if (std::pow(f / (1 - f), 2) < p / (1 - p))
                    continue;
                const auto e = forced_prefix_failure(1000, q, p, {i, f}, 100000, seed++);
                ++total;
                held += e.mean <= p + 3 * e.ci95_halfwidth;
                worst = std::max(worst, e.mean);
            }
    }
    o.check(held == total, "general bound on the condition grid: " + std::to_string(held) + "/" +
                               std::to_string(total) + " hold, largest estimate " + num(worst));
    return o;
}

std::string capture(const std::string& command, int& status) {
    std::string out;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(command.c_str(), "r"), pclose);
    if (!pipe) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0)
        out.append(buf.data(), got);
    status = pclose(pipe.release());
    return out;
}

// 7. determinism of the CLI goldens
Outcome goldens() {
    Outcome o;
    const std::filesystem::path dir = CASCADE_LAB_GOLDEN_DIR;
    std::vector<std::filesystem::path> cases;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".args")
            cases.push_back(entry.path());
    std::sort(cases.begin(), cases.end());
    std::size_t identical = 0;
    for (const auto& args_file : cases) {
        std::ifstream af(args_file);
        std::string args;
        std::getline(af, args);
        auto expected_file = args_file;
        expected_file.replace_extension(".out");
        std::ifstream ef(expected_file, std::ios::binary);
        std::stringstream expected;
        expected << ef.rdbuf();
        bool same = static_cast<bool>(ef);
        for (int workers : {1, 4, 16}) {
            int status = 0;
            const std::string out = capture("cd '" + dir.string() + "' && '" CASCADE_LAB_TOOL "' " + args +
                                                " --workers " + std::to_string(workers),
                                            status);
            same = same && status == 0 && out == expected.str();
        }
        identical += same;
        if (!same)
            o.notes.push_back("FAILED: " + args_file.stem().string());
    }
    o.check(!cases.empty() && identical == cases.size(),
            std::to_string(identical) + "/" + std::to_string(cases.size()) +
                " golden fixtures byte-identical for --workers 1, 4, 16");
    return o;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"corner-case anchors", anchors},
        {"q-sweep U-shape", u_shape},
        {"complete-graph DP correctness", dp_correctness},
        {"lower bound and log growth", lower_bound},
        {"layer machinery", layers},
        {"bound harnesses", bounds},
        {"CLI determinism", goldens},
    };
    std::vector<std::size_t> selected;
    for (int a = 1; a < argc; ++a)
        selected.push_back(std::stoul(argv[a]));
    if (selected.empty())
        for (std::size_t k = 1; k <= criteria.size(); ++k)
            selected.push_back(k);

    bool all = true;
    for (std::size_t k : selected) {
        if (k < 1 || k > criteria.size()) {
            std::cerr << "no criterion " << k << "\n";
            return 2;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome r = criteria[k - 1].second();
        all = all && r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << criteria[k - 1].first << " ("
                  << num(seconds_since(t0), 3) << " s)\n";
        for (const auto& note : r.notes)
            std::cout << "    " << note << "\n";
        std::cout.flush();
    }
    return all ? 0 : 1;
}
