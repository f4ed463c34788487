#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "xspn/dataset.hpp"
#include "xspn/random.hpp"

namespace testing {

inline xspn::BinaryDataset rows_of(std::initializer_list<std::vector<std::uint8_t>> rows) {
  const std::size_t cols = rows.begin()->size();
  std::vector<std::uint8_t> v;
  for (const auto& r : rows) v.insert(v.end(), r.begin(), r.end());
  return xspn::BinaryDataset(rows.size(), cols, std::move(v));
}

inline xspn::BinaryDataset coin_flips(std::size_t rows, std::size_t cols, std::uint64_t seed, double p = 0.5) {
  xspn::Xoshiro256 rng(seed);
  std::vector<std::uint8_t> v(rows * cols);
  for (auto& x : v) x = rng.uniform() < p;
  return xspn::BinaryDataset(rows, cols, std::move(v));
}

// Two-column data with the given probabilities of (0,0), (0,1), (1,0); (1,1) takes the rest.
inline xspn::BinaryDataset pair_data(std::size_t rows, double p00, double p01, double p10, std::uint64_t seed) {
  xspn::Xoshiro256 rng(seed);
  std::vector<std::uint8_t> v;
  for (std::size_t r = 0; r < rows; ++r) {
    const double u = rng.uniform();
    if (u < p00) v.insert(v.end(), {0, 0});
    else if (u < p00 + p01) v.insert(v.end(), {0, 1});
    else if (u < p00 + p01 + p10) v.insert(v.end(), {1, 0});
    else v.insert(v.end(), {1, 1});
  }
  return xspn::BinaryDataset(rows, 2, std::move(v));
}

inline std::vector<std::int8_t> observed(const std::vector<std::uint8_t>& x) { return {x.begin(), x.end()}; }

}  // namespace testing
