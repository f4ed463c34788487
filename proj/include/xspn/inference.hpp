#pragma once

#include <vector>

#include "xspn/dataset.hpp"
#include "xspn/network.hpp"
#include "xspn/stats.hpp"

namespace xspn {

/// log P(x) for every row. Rows are independent, so both execution modes
/// return identical values.
std::vector<double> log_likelihoods(const Network& network, const BinaryDataset& data,
                                    Execution exec = Execution::parallel);

/// Mean of log_likelihoods, summed in row order.
double mean_log_likelihood(const Network& network, const BinaryDataset& data,
                           Execution exec = Execution::parallel);

/// log P(e) per row, where variable j of row r counts as observed when
/// mask(r, j) == 1. A single-row mask applies to every row.
std::vector<double> log_marginals(const Network& network, const BinaryDataset& data, const BinaryDataset& mask,
                                  Execution exec = Execution::parallel);

}  // namespace xspn
