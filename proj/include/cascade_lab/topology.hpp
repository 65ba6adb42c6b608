#pragma once
// Observation graphs over ordered nodes. Node i only ever observes earlier
// nodes j < i, so each node stores its earlier neighbours either as one
// contiguous index range (complete and layered graphs) or as an explicit
// sorted list.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "cascade_lab/types.hpp"

namespace cascade {

class Topology {
public:
    // Half-open, 0-based range [lo, hi) of earlier nodes.
    struct Range {
        std::uint32_t lo = 0;
        std::uint32_t hi = 0;
    };
    using Neighbors = std::variant<Range, std::vector<std::uint32_t>>;

    Topology() = default;

    static Topology empty(std::size_t n) {
        check_size(n);
        return Topology(n, std::vector<Neighbors>(n, Range{}));
    }

    static Topology complete(std::size_t n) {
        check_size(n);
        std::vector<Neighbors> nb;
        nb.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            nb.emplace_back(Range{0, static_cast<std::uint32_t>(i)});
        return Topology(n, std::move(nb));
    }

    // lists[i-1] holds the 1-based earlier neighbours of node i.
    static Topology from_neighbor_lists(const std::vector<std::vector<NodeIndex>>& lists) {
        const std::size_t n = lists.size();
        check_size(n);
        std::vector<Neighbors> nb;
        nb.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::uint32_t> v;
            v.reserve(lists[i].size());
            for (NodeIndex j : lists[i]) {
                if (j < 1 || j > i)
                    throw InputError("node " + std::to_string(i + 1) + " cannot observe node " +
                                     std::to_string(j));
                v.push_back(static_cast<std::uint32_t>(j - 1));
            }
            std::sort(v.begin(), v.end());
            if (std::adjacent_find(v.begin(), v.end()) != v.end())
                throw InputError("duplicate neighbour of node " + std::to_string(i + 1));
            nb.emplace_back(std::move(v));
        }
        return Topology(n, std::move(nb));
    }

    // Internal constructor used by generators that already hold 0-based,
    // sorted, duplicate-free lists.
    static Topology from_sorted_lists(std::vector<std::vector<std::uint32_t>> lists) {
        check_size(lists.size());
        std::vector<Neighbors> nb;
        nb.reserve(lists.size());
        for (auto& l : lists)
            nb.emplace_back(std::move(l));
        const std::size_t n = nb.size();
        return Topology(n, std::move(nb));
    }

    // Each node of layer k >= 2 observes the whole of layer k-1.
    static Topology layered(const std::vector<std::size_t>& sizes) {
        std::size_t n = 0;
        for (std::size_t a : sizes) {
            if (a == 0)
                throw InputError("layer sizes must be positive");
            n += a;
        }
        check_size(n);
        std::vector<Neighbors> nb;
        nb.reserve(n);
        std::uint32_t prev_lo = 0, prev_hi = 0, start = 0;
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            for (std::size_t j = 0; j < sizes[k]; ++j)
                nb.emplace_back(k == 0 ? Range{} : Range{prev_lo, prev_hi});
            prev_lo = start;
            prev_hi = start + static_cast<std::uint32_t>(sizes[k]);
            start = prev_hi;
        }
        return Topology(n, std::move(nb));
    }

    std::size_t size() const { return n_; }

    // 1-based.
    std::vector<NodeIndex> earlier_neighbors(NodeIndex i) const {
        std::vector<NodeIndex> out;
        for_each_neighbor(i, [&](std::size_t j0) { out.push_back(j0 + 1); });
        return out;
    }

    std::size_t degree(NodeIndex i) const {
        const auto& nb = at(i);
        if (const auto* r = std::get_if<Range>(&nb))
            return r->hi - r->lo;
        return std::get<std::vector<std::uint32_t>>(nb).size();
    }

    // Calls f(j0) with the 0-based index of every earlier neighbour of 1-based node i.
    template <class F>
    void for_each_neighbor(NodeIndex i, F&& f) const {
        const auto& nb = at(i);
        if (const auto* r = std::get_if<Range>(&nb)) {
            for (std::uint32_t j = r->lo; j < r->hi; ++j)
                f(static_cast<std::size_t>(j));
        } else {
            for (std::uint32_t j : std::get<std::vector<std::uint32_t>>(nb))
                f(static_cast<std::size_t>(j));
        }
    }

    const Neighbors& neighbors_raw(NodeIndex i) const { return at(i); }

    std::size_t edge_count() const {
        std::size_t total = 0;
        for (NodeIndex i = 1; i <= n_; ++i)
            total += degree(i);
        return total;
    }

    friend bool operator==(const Topology& a, const Topology& b) {
        if (a.n_ != b.n_)
            return false;
        for (NodeIndex i = 1; i <= a.n_; ++i)
            if (a.earlier_neighbors(i) != b.earlier_neighbors(i))
                return false;
        return true;
    }

private:
    Topology(std::size_t n, std::vector<Neighbors> nb) : n_(n), nb_(std::move(nb)) {}

    static void check_size(std::size_t n) {
        if (n < 1)
            throw InputError("a topology needs at least one node");
        if (n > UINT32_MAX)
            throw InputError("too many nodes");
    }

    const Neighbors& at(NodeIndex i) const {
        if (i < 1 || i > n_)
            throw InputError("node index " + std::to_string(i) + " out of range 1.." +
                             std::to_string(n_));
        return nb_[i - 1];
    }

    std::size_t n_ = 0;
    std::vector<Neighbors> nb_;
};

// Edge-list text: line 1 holds n, then one `j i` pair per line with
// 1 <= j < i <= n. Blank lines are skipped. Errors name the offending line.
inline Topology parse_edge_list(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw InputError("edge list line " + std::to_string(lineno) + ": " + msg);
    };
    auto blank = [](const std::string& s) {
        return s.find_first_not_of(" \t\r") == std::string::npos;
    };

    long long n = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line))
            continue;
        std::istringstream ls(line);
        std::string extra;
        if (!(ls >> n) || (ls >> extra))
            fail("expected the node count");
        break;
    }
    if (n < 1) {
        if (n == -1)
            throw InputError("edge list line 1: missing the node count");
        fail("node count must be at least 1");
    }

    std::vector<std::vector<std::uint32_t>> lists(static_cast<std::size_t>(n));
    std::unordered_set<unsigned long long> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line))
            continue;
        std::istringstream ls(line);
        long long j = 0, i = 0;
        std::string extra;
        if (!(ls >> j >> i) || (ls >> extra))
            fail("expected two node indices `j i`");
        if (j < 1 || i > n || j >= i)
            fail("edge must satisfy 1 <= j < i <= n");
        if (!seen.insert(static_cast<unsigned long long>(i) * static_cast<unsigned long long>(n + 1) +
                         static_cast<unsigned long long>(j))
                 .second)
            fail("duplicate edge " + std::to_string(j) + " " + std::to_string(i));
        lists[static_cast<std::size_t>(i - 1)].push_back(static_cast<std::uint32_t>(j - 1));
    }
    for (auto& l : lists)
        std::sort(l.begin(), l.end());
    return Topology::from_sorted_lists(std::move(lists));
}

inline Topology parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

} // namespace cascade
