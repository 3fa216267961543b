#pragma once

#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "surfspin/crystal.hpp"

namespace support {

using surfspin::Vec3;
using surfspin::crystal::Structure;

inline constexpr double a0 = 3.57;

inline std::mt19937_64 rng(std::uint64_t salt) { return std::mt19937_64(0x5eed'2024ULL ^ salt); }

inline Vec3 random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(g), n(g), n(g));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

/// Sorted (i, j) index pairs of an adjacency, i < j.
inline std::set<std::pair<std::size_t, std::size_t>> edge_set(
    const surfspin::crystal::Adjacency& adj) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (const auto& nb : adj[i]) out.insert({std::min(i, nb.index), std::max(i, nb.index)});
  }
  return out;
}

inline int count_db(const Structure& s) { return surfspin::crystal::enumerate_dbs(s).total(); }

} // namespace support
