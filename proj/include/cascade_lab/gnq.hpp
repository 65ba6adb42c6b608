#pragma once

#include <random>
#include <vector>

#include "cascade_lab/rng.hpp"
#include "cascade_lab/topology.hpp"

namespace cascade {

// G(n, q): every pair present independently with probability q. Edges are
// drawn with geometric skips, so the cost is proportional to the edge count.
inline Topology sample_gnq(std::size_t n, double q, std::uint64_t seed) {
    if (!(q >= 0.0 && q <= 1.0))
        throw InputError("connection probability must lie in [0, 1]");
    if (q == 0.0)
        return Topology::empty(n);
    if (q == 1.0)
        return Topology::complete(n);
    Engine eng(seed);
    std::geometric_distribution<long long> gap(q);
    std::vector<std::vector<std::uint32_t>> lists(n);
    for (std::size_t i = 1; i < n; ++i) {
        auto& l = lists[i];
        for (long long j = gap(eng); j < static_cast<long long>(i); j += 1 + gap(eng))
            l.push_back(static_cast<std::uint32_t>(j));
    }
    return Topology::from_sorted_lists(std::move(lists));
}

} // namespace cascade
