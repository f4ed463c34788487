#pragma once

#include <cstddef>
#include <vector>

#include "xspn/dataset.hpp"
#include "xspn/learner.hpp"
#include "xspn/network.hpp"

namespace xspn {

struct GridAxes {
  std::vector<double> rho{5.0, 15.0};
  std::vector<std::size_t> min_instances{20, 200};
  std::vector<double> p{0.05, 0.1, 0.2, 0.4};
};

struct GridPoint {
  Hyperparams hp;
  double valid_loglik = 0.0;
  std::size_t nodes = 0;
  double seconds = 0.0;
};

struct GridResult {
  std::vector<GridPoint> points;
  std::size_t best = 0;  // first point with the highest validation log-likelihood
  Network model;
};

/// Trains one network per grid point (varying rho, m and, for variants that
/// test exchangeability, p; other fields come from `base`) and keeps the one
/// with the highest mean validation log-likelihood.
GridResult grid_search(const BinaryDataset& train, const BinaryDataset& valid, const Hyperparams& base,
                       const GridAxes& axes = {});

}  // namespace xspn
