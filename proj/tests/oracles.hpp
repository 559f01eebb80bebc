#pragma once

// Brute-force reference computations used to freeze expected values. They
// deliberately avoid the orbit, split and solver machinery under test.

#include <phylocsp/tree.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

inline std::size_t double_factorial_trees(std::size_t n)
{
    std::size_t r = 1;
    for (std::size_t i = 3; i <= n; ++i)
        r *= 2 * i - 3;
    return r;
}

// Clusters (leaf sets below each node, singletons included) of a Newick string, read
// character by character.
inline std::set<std::set<std::string>> clusters(const std::string & newick)
{
    std::set<std::set<std::string>> out;
    std::vector<std::set<std::string>> stack;
    std::string label;
    auto flush = [&] {
        if (! label.empty()) {
            out.insert({label});
            for (auto & s : stack)
                s.insert(label);
            label.clear();
        }
    };
    for (char c : newick) {
        if (c == '(') {
            flush();
            stack.emplace_back();
        }
        else if (c == ')') {
            flush();
            out.insert(stack.back());
            stack.pop_back();
        }
        else if (c == ',' || c == ';')
            flush();
        else
            label += c;
    }
    return out;
}

// x|yz from clusters: some cluster holds y and z but not x, with x != y, z.
inline bool cone(const std::set<std::set<std::string>> & cl, const std::string & x, const std::string & y,
    const std::string & z)
{
    if (x == y || x == z)
        return false;
    for (const auto & c : cl)
        if (c.count(y) && c.count(z) && ! c.count(x))
            return true;
    return false;
}

// Orbit signature of a tuple: the kernel plus every cone triple.
using Signature = std::pair<std::vector<int>, std::vector<bool>>;

inline Signature signature(const std::set<std::set<std::string>> & cl, const std::vector<std::string> & tuple)
{
    const std::size_t k = tuple.size();
    Signature s;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            s.first.push_back(tuple[i] == tuple[j]);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t l = 0; l < k; ++l)
                s.second.push_back(cone(cl, tuple[i], tuple[j], tuple[l]));
    return s;
}

// Number of orbits of k-tuples: distinct signatures over every tree on k
// leaves and every map of the coordinates into its leaves.
inline std::size_t orbit_count_by_signatures(int k)
{
    std::vector<std::string> labels;
    for (int i = 0; i < k; ++i)
        labels.push_back("l" + std::to_string(i));
    std::set<Signature> seen;
    for (const auto & t : phylo::enumerate_trees(labels)) {
        auto cl = clusters(t.to_newick());
        std::vector<int> digits(k, 0);
        while (true) {
            std::vector<std::string> tuple;
            for (int d : digits)
                tuple.push_back(labels[d]);
            seen.insert(signature(cl, tuple));
            int i = 0;
            while (i < k && ++digits[i] == k)
                digits[i++] = 0;
            if (i == k)
                break;
        }
    }
    return seen.size();
}

using Bits = std::uint32_t;

inline bool closed_under_xor3(const std::set<Bits> & b)
{
    for (Bits x : b)
        for (Bits y : b)
            for (Bits z : b)
                if (! b.count(x ^ y ^ z))
                    return false;
    return true;
}

// Rows as (mask, rhs); brute force over all assignments.
inline std::set<Bits> solutions(int n, const std::vector<std::pair<Bits, bool>> & rows)
{
    std::set<Bits> out;
    for (Bits a = 0; a < (Bits{1} << n); ++a) {
        bool ok = true;
        for (auto [mask, rhs] : rows)
            ok = ok && (__builtin_popcount(a & mask) & 1) == static_cast<int>(rhs);
        if (ok)
            out.insert(a);
    }
    return out;
}

inline bool nae_truth_table(int n, const std::vector<std::array<int, 3>> & clauses)
{
    for (Bits a = 0; a < (Bits{1} << n); ++a) {
        bool ok = true;
        for (auto [x, y, z] : clauses) {
            int s = (a >> x & 1) + (a >> y & 1) + (a >> z & 1);
            ok = ok && s != 0 && s != 3;
        }
        if (ok)
            return true;
    }
    return false;
}

}  // namespace oracle
