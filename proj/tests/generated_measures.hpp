#pragma once

#include "cantor/measure_tree.hpp"

#include <random>
#include <vector>

// Continuous dyadic measures for granularity tests. Split ratios stay close to 1/2 so that
// every level-16 cylinder is below 2^-14.
namespace generated {

// Each node splits with a ratio drawn from {61,64,67}/128.
inline cantor::MeasureTree jitter(std::uint64_t seed, std::size_t depth = 16) {
    std::mt19937_64 rng(seed);
    cantor::MeasureTree t(depth);
    t.set("", cantor::Dyadic(1));
    std::vector<cantor::BitString> frontier{""};
    const long long ratios[] = {61, 64, 67};
    for (std::size_t k = 0; k < depth; ++k) {
        std::vector<cantor::BitString> next;
        for (const auto& s : frontier) {
            cantor::Dyadic v = t.get(s);
            cantor::Dyadic left = v * cantor::Dyadic(cantor::BigInt(ratios[rng() % 3]), 7);
            t.set(s + "0", left);
            t.set(s + "1", v - left);
            next.push_back(s + "0");
            next.push_back(s + "1");
        }
        frontier = std::move(next);
    }
    return t;
}

// Uniform except on a few levels where every node splits 1/4 : 3/4 in a random direction.
inline cantor::MeasureTree skewed_levels(std::uint64_t seed, std::size_t depth = 16) {
    std::mt19937_64 rng(seed);
    std::vector<bool> skew(depth, false);
    for (int j = 0; j < 3; ++j) skew[rng() % depth] = true;
    return cantor::tree_from_function(depth, [&](const cantor::BitString& s) {
        cantor::Dyadic v(1);
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!skew[k]) {
                v = v.half();
                continue;
            }
            bool heavy_one = (cantor::string_index(s.substr(0, k)) * 2654435761u + seed) % 2;
            bool one = s[k] == '1';
            v = v * cantor::Dyadic(one == heavy_one ? 3 : 1, 2);
        }
        return v;
    });
}

// Product measure with P(1) = 17/32.
inline cantor::MeasureTree tilted(std::size_t depth = 16) {
    return cantor::tree_from_oracle(cantor::measures::bernoulli(cantor::Dyadic(17, 5)), depth);
}

}  // namespace generated
