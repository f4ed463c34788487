#include "xspn/cluster.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "xspn/error.hpp"
#include "xspn/logmath.hpp"
#include "xspn/random.hpp"

namespace xspn {

std::vector<std::size_t> RowPartition::sizes() const {
  std::vector<std::size_t> s(clusters, 0);
  for (auto a : assignment) ++s[a];
  return s;
}

std::vector<std::vector<std::size_t>> RowPartition::members(std::span<const std::size_t> rows) const {
  std::vector<std::vector<std::size_t>> out(clusters);
  for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(rows[i]);
  return out;
}

RowPartition cluster_rows(const BinaryDataset& data, std::span<const std::size_t> rows,
                          std::span<const VariableId> vars, std::size_t k, std::uint64_t seed,
                          const GmmOptions& options, Execution exec) {
  const std::size_t m = rows.size();
  const std::size_t d = vars.size();
  if (k < 2) throw InputError("cluster_rows needs k >= 2");
  if (m < 2) throw InputError("cluster_rows needs at least two rows");
  if (d == 0) throw InputError("cluster_rows needs at least one variable");
  for (VariableId v : vars)
    if (v >= data.cols()) throw InputError("variable " + std::to_string(v) + " is not a dataset column");
  const bool par = exec == Execution::parallel;

  std::vector<std::uint8_t> x(m * d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) x[i * d + j] = data(rows[i], vars[j]);

  std::vector<double> resp(m * k);
  {
    Xoshiro256 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
      double total = 0.0;
      for (std::size_t c = 0; c < k; ++c) total += resp[i * k + c] = rng.uniform() + 1e-12;
      for (std::size_t c = 0; c < k; ++c) resp[i * k + c] /= total;
    }
  }

  std::vector<double> log_weight(k), mean(k * d), var(k * d);
  // Per component: log density of the all-zero row, and per-dimension increment when x_j = 1.
  std::vector<double> base(k), delta(k * d);
  std::vector<double> row_ll(m);
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  const auto md = static_cast<std::ptrdiff_t>(d);
  const auto mm = static_cast<std::ptrdiff_t>(m);
  double previous = kNegInf;

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    // M-step. Sums run over rows in order inside each (component, dimension), so
    // the result does not depend on how dimensions are split over threads.
    std::vector<double> mass(k, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t c = 0; c < k; ++c) mass[c] += resp[i * k + c];
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t jj = 0; jj < md; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      for (std::size_t c = 0; c < k; ++c) {
        double s1 = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          if (x[i * d + j]) s1 += resp[i * k + c];
        if (mass[c] <= 0.0) {
          mean[c * d + j] = 0.5;
          var[c * d + j] = 0.25;
          continue;
        }
        // x is binary, so E[(x - mu)^2] = mu (1 - mu) under the responsibilities.
        const double mu = s1 / mass[c];
        mean[c * d + j] = mu;
        var[c * d + j] = std::max(mu * (1.0 - mu), options.variance_floor);
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      log_weight[c] = safe_log(mass[c] / static_cast<double>(m));
      double b = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double mu = mean[c * d + j];
        const double v = var[c * d + j];
        const double norm = -0.5 * (log_2pi + std::log(v));
        const double zero = norm - 0.5 * mu * mu / v;
        const double one = norm - 0.5 * (1.0 - mu) * (1.0 - mu) / v;
        b += zero;
        delta[c * d + j] = one - zero;
      }
      base[c] = b;
    }

    // E-step, one row per iteration.
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t ii = 0; ii < mm; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      double lp[16];
      std::vector<double> heap;
      double* l = lp;
      if (k > 16) {
        heap.resize(k);
        l = heap.data();
      }
      for (std::size_t c = 0; c < k; ++c) {
        double v = log_weight[c] + base[c];
        for (std::size_t j = 0; j < d; ++j)
          if (x[i * d + j]) v += delta[c * d + j];
        l[c] = v;
      }
      const double total = log_sum_exp(std::span<const double>(l, k));
      row_ll[i] = total;
      for (std::size_t c = 0; c < k; ++c) resp[i * k + c] = std::exp(l[c] - total);
    }
    double ll = 0.0;
    for (double v : row_ll) ll += v;
    ll /= static_cast<double>(m);
    if (std::abs(ll - previous) < options.tolerance) break;
    previous = ll;
  }

  RowPartition part;
  part.clusters = k;
  part.assignment.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c)
      if (resp[i * k + c] > resp[i * k + best]) best = c;
    part.assignment[i] = static_cast<std::uint32_t>(best);
  }
  for (std::size_t s : part.sizes())
    if (s == 0) part.degenerate = true;
  return part;
}

}  // namespace xspn
