#include <gtest/gtest.h>

#include <random>

#include "cascade_lab/engine.hpp"
#include "cascade_lab/exact_oracle.hpp"

using namespace cascade;

namespace {

std::vector<Bit> bits(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

Observation observe(NodeIndex node, const std::vector<Bit>& d, const std::vector<std::uint8_t>& valid) {
    return Observation{node, d, valid};
}

} // namespace

TEST(MajorityDecide, Examples) {
    EXPECT_EQ(majority_decide(bits({1, 1}), 0), 1);
    EXPECT_EQ(majority_decide(bits({1}), 0), 0);
    EXPECT_EQ(majority_decide(bits({}), 1), 1);
    EXPECT_EQ(majority_decide(bits({}), 0), 0);
}

TEST(MajorityDecide, TiesPassTheSignalThrough) {
    for (auto v : {bits({1, 0}), bits({0, 1, 1, 0}), bits({1, 1, 0, 0, 0, 1})})
        for (Bit s : {0, 1})
            EXPECT_EQ(majority_decide(v, s), s);
    // one neighbour plus an opposite signal is a tie as well
    EXPECT_EQ(majority_decide(bits({0}), 1), 1);
}

TEST(SignedDiff, Examples) {
    EXPECT_EQ(signed_diff(bits({1, 0, 1})), 1);
    EXPECT_EQ(signed_diff(bits({})), 0);
    EXPECT_EQ(signed_diff(bits({0, 0, 1, 0})), -2);
}

TEST(Posterior, Examples) {
    EXPECT_DOUBLE_EQ(posterior_truth_given_diff(2.0 / 3, 0), 0.5);
    EXPECT_NEAR(posterior_truth_given_diff(2.0 / 3, 2), 0.8, 1e-15);
    for (double p : {0.55, 0.6, 2.0 / 3, 0.75, 0.9})
        EXPECT_NEAR(posterior_truth_given_diff(p, 1), p, 1e-15);
}

TEST(Posterior, SymmetricIncreasingAndConsistent) {
    for (double p : {0.51, 0.6, 2.0 / 3, 0.75, 0.9, 0.99}) {
        const double r = (1 - p) / p;
        double prev = -1;
        for (long d = -30; d <= 30; ++d) {
            const double f = posterior_truth_given_diff(p, d);
            EXPECT_NEAR(f + posterior_truth_given_diff(p, -d), 1.0, 1e-12);
            EXPECT_NEAR(f * std::pow(r, static_cast<double>(d)), 1.0 - f, 1e-12);
            if (prev < 1.0) {  // saturates at 1 for large d in double precision
                EXPECT_GT(f, prev);
            }
            prev = f;
        }
    }
}

TEST(IsRevealing, Examples) {
    const std::vector<std::uint8_t> valid{1, 1};
    EXPECT_TRUE(is_revealing(MajorityRule{}, observe(3, bits({1, 0}), valid)));
    EXPECT_FALSE(is_revealing(MajorityRule{}, observe(3, bits({1, 1}), valid)));
    EXPECT_TRUE(is_revealing(AlwaysReveal{}, observe(3, bits({1, 1}), valid)));
    EXPECT_TRUE(is_revealing(AlwaysReveal{}, observe(1, bits({}), {})));
}

TEST(IsRevealing, CustomRulesAreJudgedFunctionWise) {
    CustomRule constant = [](const Observation&, Bit) -> Bit { return 1; };
    CustomRule negate = [](const Observation&, Bit s) -> Bit { return 1 - s; };
    CustomRule copy = [](const Observation&, Bit s) -> Bit { return s; };
    const auto o = observe(1, bits({}), {});
    EXPECT_FALSE(is_revealing(constant, o));
    EXPECT_FALSE(is_revealing(negate, o));
    EXPECT_TRUE(is_revealing(copy, o));
    EXPECT_EQ(decide(negate, o, 1), 0);
}

TEST(RunSequence, CompleteGraphHandTraces) {
    const auto g = Topology::complete(3);
    const auto maj = StrategyProfile::uniform(MajorityRule{});

    auto t = run_sequence(g, maj, bits({1, 0, 1}));
    EXPECT_EQ(t.decisions, bits({1, 0, 1}));
    EXPECT_EQ(t.valid_mask, (std::vector<std::uint8_t>{1, 1, 1}));

    t = run_sequence(g, maj, bits({1, 1, 0}));
    EXPECT_EQ(t.decisions, bits({1, 1, 1}));
    EXPECT_EQ(t.valid_mask, (std::vector<std::uint8_t>{1, 1, 0}));
    EXPECT_EQ(t.wrong_count(1), 0u);
    EXPECT_EQ(t.wrong_count(0), 3u);
}

TEST(RunSequence, EmptyGraphCopiesSignals) {
    const auto g = Topology::empty(6);
    const auto s = bits({0, 1, 1, 0, 0, 1});
    for (auto profile : {StrategyProfile::uniform(MajorityRule{}), StrategyProfile::uniform(AlwaysReveal{})}) {
        const auto t = run_sequence(g, profile, s);
        EXPECT_EQ(t.decisions, s);
        EXPECT_EQ(t.valid_mask, std::vector<std::uint8_t>(6, 1));
    }
}

TEST(RunSequence, LengthMismatchIsAnInputError) {
    EXPECT_THROW(run_sequence(Topology::complete(3), StrategyProfile{}, bits({1, 0})), InputError);
}

TEST(RunSequence, ProfileMustCoverEveryNode) {
    auto short_profile = StrategyProfile::per_node({MajorityRule{}, MajorityRule{}});
    EXPECT_THROW(run_sequence(Topology::complete(3), short_profile, bits({1, 0, 1})), InputError);
    auto table = std::make_shared<const DeltaTable>(2.0 / 3, std::vector<int>{1, 2});
    EXPECT_THROW(run_sequence(Topology::complete(3), StrategyProfile::uniform(ThresholdRule{table}), bits({1, 0, 1})),
                 InputError);
}

TEST(ValidSubsequence, Examples) {
    DecisionTrace t;
    t.decisions = bits({1, 0, 1});
    t.valid_mask = {1, 1, 1};
    EXPECT_EQ(valid_subsequence(t), bits({1, 0, 1}));
    t.decisions = bits({1, 1, 1});
    t.valid_mask = {1, 1, 0};
    EXPECT_EQ(valid_subsequence(t), bits({1, 1}));
    t.decisions = bits({0, 0, 0, 0});
    t.valid_mask = {1, 1, 0, 0};
    EXPECT_EQ(valid_subsequence(t), bits({0, 0}));
}

namespace {

std::vector<Topology> fixture_topologies() {
    return {Topology::complete(7),
            Topology::empty(5),
            Topology::layered({2, 3, 2}),
            Topology::from_neighbor_lists({{}, {1}, {1}, {2, 3}, {1, 4}, {5}, {1, 2, 3, 4, 5, 6}})};
}

} // namespace

TEST(RunSequence, ValidityIsSoundAndFlipSymmetric) {
    std::mt19937 eng(3);
    for (const auto& g : fixture_topologies()) {
        const std::size_t n = g.size();
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Bit> s(n);
            for (auto& b : s)
                b = eng() & 1;
            for (const auto& profile : {StrategyProfile::uniform(MajorityRule{}),
                                        StrategyProfile::uniform(AlwaysReveal{})}) {
                const auto t = run_sequence(g, profile, s);
                for (std::size_t k = 0; k < n; ++k) {
                    if (t.valid_mask[k]) {
                        EXPECT_EQ(t.decisions[k], s[k]);
                    }
                }

                // flipping every bit flips the whole trace
                std::vector<Bit> flipped(n);
                for (std::size_t k = 0; k < n; ++k)
                    flipped[k] = 1 - s[k];
                const auto tf = run_sequence(g, profile, flipped);
                for (std::size_t k = 0; k < n; ++k) {
                    EXPECT_EQ(tf.decisions[k], 1 - t.decisions[k]);
                    EXPECT_EQ(tf.valid_mask[k], t.valid_mask[k]);
                }

                // a valid node flips exactly its own decision when its signal flips
                for (std::size_t k = 0; k < n; ++k) {
                    if (!t.valid_mask[k])
                        continue;
                    std::vector<Bit> obs_d;
                    std::vector<std::uint8_t> obs_v;
                    g.for_each_neighbor(k + 1, [&](std::size_t j) {
                        obs_d.push_back(t.decisions[j]);
                        obs_v.push_back(t.valid_mask[j]);
                    });
                    const Observation o{k + 1, obs_d, obs_v};
                    EXPECT_EQ(decide(profile.rule_for(k + 1), o, 1 - s[k]), 1 - t.decisions[k]);
                }
            }
        }
    }
}

TEST(RunSequence, TallyPathMatchesObservationPath) {
    // a custom rule that forwards to the built-in one takes the observation path
    std::mt19937 eng(11);
    auto table = std::make_shared<const DeltaTable>(2.0 / 3, std::vector<int>{1, 2, 1, 2, 3, 2, 1});
    for (Rule builtin : std::vector<Rule>{MajorityRule{}, AlwaysReveal{}, ThresholdRule{table}}) {
        CustomRule forward = [builtin](const Observation& o, Bit s) { return decide(builtin, o, s); };
        for (const auto& g : fixture_topologies()) {
            for (int trial = 0; trial < 40; ++trial) {
                std::vector<Bit> s(g.size());
                for (auto& b : s)
                    b = eng() & 1;
                const auto a = run_sequence(g, StrategyProfile::uniform(builtin), s);
                const auto b = run_sequence(g, StrategyProfile::uniform(forward), s);
                EXPECT_EQ(a.decisions, b.decisions);
                EXPECT_EQ(a.valid_mask, b.valid_mask);
            }
        }
    }
}

TEST(RunSequence, IsDeterministic) {
    const auto g = Topology::layered({3, 4, 2});
    const auto s = bits({1, 0, 0, 1, 1, 0, 1, 0, 1});
    const auto a = run_sequence(g, StrategyProfile{}, s);
    const auto b = run_sequence(g, StrategyProfile{}, s);
    EXPECT_EQ(a.decisions, b.decisions);
    EXPECT_EQ(a.valid_mask, b.valid_mask);
}

TEST(SignalModel, Validation) {
    EXPECT_NO_THROW(SignalModel::make(2.0 / 3));
    EXPECT_NO_THROW(SignalModel::make(1.0));
    EXPECT_THROW(SignalModel::make(0.5), InputError);
    EXPECT_THROW(SignalModel::make(0.7, 2), InputError);
    EXPECT_THROW(require_accuracy(1.0), InputError);
    EXPECT_THROW(require_accuracy(0.4), InputError);
}

TEST(Topology, Builders) {
    const auto c = Topology::complete(4);
    EXPECT_EQ(c.earlier_neighbors(4), (std::vector<NodeIndex>{1, 2, 3}));
    EXPECT_EQ(c.edge_count(), 6u);
    EXPECT_EQ(Topology::empty(4).edge_count(), 0u);
    const auto l = Topology::layered({2, 1});
    EXPECT_EQ(l.earlier_neighbors(3), (std::vector<NodeIndex>{1, 2}));
    EXPECT_TRUE(l.earlier_neighbors(1).empty());
    EXPECT_TRUE(l.earlier_neighbors(2).empty());
    EXPECT_EQ(Topology::layered({5}), Topology::empty(5));
    EXPECT_THROW(Topology::empty(0), InputError);
    EXPECT_THROW(Topology::from_neighbor_lists({{}, {2}}), InputError);
    EXPECT_THROW(Topology::from_neighbor_lists({{}, {1}, {1, 1}}), InputError);
}

TEST(Topology, EdgeListParsing) {
    const auto g = parse_edge_list("3\n1 3\n2 3\n");
    EXPECT_EQ(g, Topology::layered({2, 1}));
    EXPECT_EQ(parse_edge_list("2\n\n1 2\n"), Topology::complete(2));

    auto message = [](const std::string& text) {
        try {
            parse_edge_list(text);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("3\n1 3\n1 3\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("3\n3 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("3\n1 4\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("3\n1 x\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("3\n1 2 3\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("zero\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("").find("line"), std::string::npos);
}
