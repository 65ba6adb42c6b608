// cascade_lab command-line tool.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cascade_lab/cli.hpp"

namespace {

namespace cli = cascade::cli;

void add_common(CLI::App* sub, cli::RunConfig& c) {
    sub->add_option("--p", c.p, "signal accuracy, decimal or fraction such as 2/3")->capture_default_str();
    sub->add_option("--workers", c.workers, "worker threads (0: CASCADE_LAB_WORKERS or all cores)");
}

void add_random(CLI::App* sub, cli::RunConfig& c) {
    sub->add_option("--reps", c.reps, "Monte Carlo replicates")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_flag("--ci", c.ci, "reproducible mode: --seed becomes mandatory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information cascade laboratory"};
    app.require_subcommand(1);
    cli::RunConfig c;
    std::string output;
    app.add_option("-o,--output", output, "write to this file instead of stdout");

    auto* sim = app.add_subcommand("sim", "estimate the expected number of wrong nodes");
    sim->add_option("--n", c.n, "node count")->expected(1);
    sim->add_option("--topology", c.topology, "empty | complete | gnq:<q> | layers:<file> | edges:<file>")
        ->capture_default_str();
    sim->add_option("--strategy", c.strategy, "maj | reveal | opt")->capture_default_str();
    add_common(sim, c);
    add_random(sim, c);

    auto* sweep = app.add_subcommand("sweep-q", "majority cascades on G(n, q) across a grid of q");
    sweep->add_option("--n", c.n, "node counts")->required()->delimiter(',');
    sweep->add_option("--q-grid", c.q_grid, "comma-separated q values (default: geometric grid)")->delimiter(',');
    sweep->add_flag("--fixed-graph", c.fixed_graph, "one graph per grid point instead of per replicate");
    add_common(sweep, c);
    add_random(sweep, c);

    auto* delta = app.add_subcommand("delta", "optimal reveal thresholds on the complete graph");
    delta->add_option("--n", c.n, "node count")->required()->expected(1);
    add_common(delta, c);

    auto* optc = app.add_subcommand("opt-complete", "optimal expected wrong count on the complete graph");
    optc->add_option("--n", c.n, "node counts")->required()->delimiter(',');
    add_common(optc, c);

    auto* layers = app.add_subcommand("layers-opt", "layer designs and their exact loss");
    layers->add_option("--n", c.n, "node counts")->required()->delimiter(',');
    layers->add_option("--mode", c.mode, "exact | asymptotic | two-layer | all")->capture_default_str();
    layers->add_option("--semantics", c.semantics, "carry | strict")->capture_default_str();
    layers->add_option("--window", c.window, "first-layer search window of the exact DP")->capture_default_str();
    add_common(layers, c);

    auto* compare = app.add_subcommand("compare", "estimates for the main topologies and strategies");
    compare->add_option("--n", c.n, "node count")->required()->expected(1);
    compare->add_option("--sweep-reps", c.sweep_reps, "replicates per q when locating the best G(n, q)");
    add_common(compare, c);
    add_random(compare, c);

    auto* oracle = app.add_subcommand("oracle", "exact expected wrong counts on small instances");
    oracle->add_option("--n", c.n, "node count")->expected(1);
    oracle->add_option("--topology", c.topology, "empty | complete | layers:<file> | edges:<file>")
        ->capture_default_str();
    oracle->add_option("--strategy", c.strategy, "best | maj | reveal | opt (default: best)");
    add_common(oracle, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    if (c.subcommand == "oracle" && oracle->count("--strategy") == 0)
        c.strategy = "best";

    try {
        const std::string text = cli::run(c);
        if (output.empty()) {
            std::fwrite(text.data(), 1, text.size(), stdout);
        } else {
            std::ofstream out(output, std::ios::binary);
            if (!out)
                throw cascade::InputError("cannot write '" + output + "'");
            out << text;
        }
    } catch (const cascade::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cascade::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
