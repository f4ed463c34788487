#include "xspn/inference.hpp"

#include <cstddef>
#include <exception>
#include <string>

#include "xspn/error.hpp"

namespace xspn {

namespace {

void check_width(const Network& network, const BinaryDataset& data) {
  if (data.cols() < network.variable_count())
    throw InputError("dataset has " + std::to_string(data.cols()) + " columns; model needs " +
                     std::to_string(network.variable_count()));
}

// Runs body(i) over all rows, rethrowing the first exception on the calling thread.
template <typename Body>
void for_rows(std::size_t count, Execution exec, Body&& body) {
  const auto n = static_cast<std::ptrdiff_t>(count);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(xspn_for_rows)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<double> log_likelihoods(const Network& network, const BinaryDataset& data, Execution exec) {
  check_width(network, data);
  std::vector<double> out(data.rows());
  for_rows(data.rows(), exec, [&](std::size_t r) { out[r] = network.log_evaluate(data.row(r)); });
  return out;
}

double mean_log_likelihood(const Network& network, const BinaryDataset& data, Execution exec) {
  if (data.rows() == 0) throw InputError("cannot average over an empty dataset");
  double total = 0.0;
  for (double v : log_likelihoods(network, data, exec)) total += v;
  return total / static_cast<double>(data.rows());
}

std::vector<double> log_marginals(const Network& network, const BinaryDataset& data, const BinaryDataset& mask,
                                  Execution exec) {
  check_width(network, data);
  if (mask.cols() != data.cols())
    throw InputError("evidence mask has " + std::to_string(mask.cols()) + " columns; data has " +
                     std::to_string(data.cols()));
  if (mask.rows() != 1 && mask.rows() != data.rows())
    throw InputError("evidence mask must have one row or one row per sample");
  std::vector<double> out(data.rows());
  const std::size_t cols = data.cols();
  for_rows(data.rows(), exec, [&](std::size_t r) {
    const auto m = mask.row(mask.rows() == 1 ? 0 : r);
    const auto x = data.row(r);
    std::vector<std::int8_t> e(cols);
    for (std::size_t j = 0; j < cols; ++j) e[j] = m[j] ? static_cast<std::int8_t>(x[j]) : PartialEvidence::kUnobserved;
    out[r] = network.log_marginal(std::span<const std::int8_t>(e));
  });
  return out;
}

}  // namespace xspn
