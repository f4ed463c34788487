#include "xspn/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "xspn/combinatorics.hpp"
#include "xspn/error.hpp"

namespace xspn {

std::array<std::array<double, 2>, 2> PairCounts::table() const noexcept {
  std::array<std::array<double, 2>, 2> t{};
  t[1][1] = static_cast<double>(both);
  t[1][0] = static_cast<double>(ones_a - both);
  t[0][1] = static_cast<double>(ones_b - both);
  t[0][0] = static_cast<double>(total - ones_a - ones_b + both);
  return t;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

std::vector<PairCounts> pairwise_counts_serial(const BinaryDataset& data, std::span<const std::size_t> rows,
                                               std::span<const VariableId> vars) {
  const std::size_t n = vars.size();
  std::vector<PairCounts> out(n * (n - 1) / 2);
  for (auto& c : out) c.total = rows.size();
  std::vector<std::size_t> ones(n, 0);
  for (std::size_t r : rows) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!data(r, vars[i])) continue;
      ++ones[i];
      for (std::size_t j = i + 1; j < n; ++j) out[pair_index(i, j, n)].both += data(r, vars[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      auto& c = out[pair_index(i, j, n)];
      c.ones_a = ones[i];
      c.ones_b = ones[j];
    }
  return out;
}

std::vector<PairCounts> pairwise_counts_packed(const BinaryDataset& data, std::span<const std::size_t> rows,
                                               std::span<const VariableId> vars) {
  const std::size_t n = vars.size();
  const std::size_t m = rows.size();
  const std::size_t words = (m + 63) / 64;
  std::vector<std::uint64_t> bits(n * words, 0);
  std::vector<std::size_t> ones(n, 0);

  const auto nv = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t vi = 0; vi < nv; ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    std::uint64_t* col = bits.data() + v * words;
    for (std::size_t k = 0; k < m; ++k)
      if (data(rows[k], vars[v])) col[k >> 6] |= std::uint64_t{1} << (k & 63);
    std::size_t c = 0;
    for (std::size_t w = 0; w < words; ++w) c += static_cast<std::size_t>(std::popcount(col[w]));
    ones[v] = c;
  }

  const auto pairs = all_pairs(n);
  std::vector<PairCounts> out(pairs.size());
  const auto np = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t pi = 0; pi < np; ++pi) {
    const auto [i, j] = pairs[static_cast<std::size_t>(pi)];
    const std::uint64_t* a = bits.data() + i * words;
    const std::uint64_t* b = bits.data() + j * words;
    std::size_t both = 0;
    for (std::size_t w = 0; w < words; ++w) both += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
    out[static_cast<std::size_t>(pi)] = PairCounts{m, ones[i], ones[j], both};
  }
  return out;
}

}  // namespace

std::vector<PairCounts> pairwise_counts(const BinaryDataset& data, std::span<const std::size_t> rows,
                                        std::span<const VariableId> vars, Execution exec) {
  for (VariableId v : vars)
    if (v >= data.cols()) throw InputError("variable " + std::to_string(v) + " is not a dataset column");
  if (vars.size() < 2) return {};
  return exec == Execution::parallel ? pairwise_counts_packed(data, rows, vars)
                                     : pairwise_counts_serial(data, rows, vars);
}

// ---------------------------------------------------------------------- g-test

double g_statistic(const PairCounts& counts, double alpha) noexcept {
  auto o = counts.table();
  for (auto& row : o)
    for (double& cell : row) cell += alpha;
  const double total = o[0][0] + o[0][1] + o[1][0] + o[1][1];
  if (total <= 0.0) return 0.0;
  const double ra[2] = {o[0][0] + o[0][1], o[1][0] + o[1][1]};
  const double cb[2] = {o[0][0] + o[1][0], o[0][1] + o[1][1]};
  double g = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      if (o[a][b] <= 0.0) continue;  // 0 ln(0 / E) = 0
      const double expected = ra[a] * cb[b] / total;
      g += o[a][b] * std::log(o[a][b] / expected);
    }
  return std::max(0.0, 2.0 * g);
}

double g_statistic(const BinaryDataset& data, std::span<const std::size_t> rows, VariableId i, VariableId j,
                   double alpha) {
  if (i == j) throw InputError("g_statistic needs two distinct variables");
  if (rows.empty()) throw InputError("g_statistic needs at least one row");
  const VariableId vars[2] = {i, j};
  return g_statistic(pairwise_counts(data, rows, vars, Execution::serial).front(), alpha);
}

std::vector<std::vector<VariableId>> split_variables(const BinaryDataset& data, std::span<const std::size_t> rows,
                                                     std::span<const VariableId> vars, double rho, double alpha,
                                                     Execution exec) {
  const std::size_t n = vars.size();
  if (n < 2) throw InputError("split_variables needs at least two variables");
  if (rows.empty()) throw InputError("split_variables needs at least one row");
  const auto counts = pairwise_counts(data, rows, vars, exec);

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (g_statistic(counts[pair_index(i, j, n)], alpha) > rho) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }

  std::vector<std::vector<VariableId>> groups;
  std::vector<std::size_t> slot(n, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vars[a] < vars[b]; });
  for (std::size_t k : order) {
    const std::size_t r = find(k);
    if (slot[r] == n) {
      slot[r] = groups.size();
      groups.emplace_back();
    }
    groups[slot[r]].push_back(vars[k]);
  }
  return groups;
}

// ---------------------------------------------------- exchangeability tests

namespace {

std::vector<std::size_t> cell_counts(const BinaryDataset& data, std::span<const std::size_t> rows,
                                     std::span<const VariableId> vars, std::size_t max_vars) {
  const std::size_t n = vars.size();
  if (n == 0) throw InputError("exchangeability test needs at least one variable");
  if (rows.empty()) throw InputError("exchangeability test needs at least one row");
  if (n > max_vars || n >= 63)
    throw CapacityError("full exchangeability test enumerates 2^" + std::to_string(n) +
                        " cells; limit is " + std::to_string(max_vars) + " variables");
  for (VariableId v : vars)
    if (v >= data.cols()) throw InputError("variable " + std::to_string(v) + " is not a dataset column");
  std::vector<std::size_t> cells(std::size_t{1} << n, 0);
  for (std::size_t r : rows) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) idx |= static_cast<std::size_t>(data(r, vars[k])) << k;
    ++cells[idx];
  }
  return cells;
}

// Expected count of each cell: c_t / C(n, t) for the cell's class t.
std::vector<double> expected_cells(std::span<const std::size_t> cells, std::size_t n) {
  std::vector<double> class_count(n + 1, 0.0);
  for (std::size_t idx = 0; idx < cells.size(); ++idx)
    class_count[static_cast<std::size_t>(std::popcount(idx))] += static_cast<double>(cells[idx]);
  std::vector<double> expected(cells.size());
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const auto t = static_cast<std::size_t>(std::popcount(idx));
    expected[idx] = class_count[t] / binomial(n, t);
  }
  return expected;
}

Chi2Result chi2_from_cells(std::span<const std::size_t> cells, std::size_t n, double significance) {
  if (!(significance > 0.0 && significance < 1.0)) throw InputError("significance must lie in (0, 1)");
  const auto expected = expected_cells(cells, n);
  Chi2Result res;
  bool impossible = false;
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const double o = static_cast<double>(cells[idx]);
    const double e = expected[idx];
    if (e == 0.0) {
      if (o > 0.0) impossible = true;
      continue;
    }
    res.statistic += (o - e) * (o - e) / e;
  }
  res.dof = static_cast<double>(cells.size()) - 1.0 - static_cast<double>(n);
  res.p_value = impossible ? 0.0 : chi2_survival(res.statistic, res.dof);
  res.exchangeable = !(res.p_value < significance);
  return res;
}

}  // namespace

std::vector<double> fit_exchangeable_null(const BinaryDataset& data, std::span<const std::size_t> rows,
                                          std::span<const VariableId> vars, std::size_t max_vars) {
  const auto cells = cell_counts(data, rows, vars, max_vars);
  auto p = expected_cells(cells, vars.size());
  const double total = static_cast<double>(rows.size());
  for (double& v : p) v /= total;
  return p;
}

Chi2Result chi2_exchangeability_full(const BinaryDataset& data, std::span<const std::size_t> rows,
                                     std::span<const VariableId> vars, double significance, std::size_t max_vars) {
  const auto cells = cell_counts(data, rows, vars, max_vars);
  return chi2_from_cells(cells, vars.size(), significance);
}

Chi2Result chi2_exchangeability_pair(const PairCounts& counts, double significance) {
  // Cell bit 0 = first variable, bit 1 = second, as in the full test.
  const auto t = counts.table();
  const std::size_t cells[4] = {static_cast<std::size_t>(t[0][0]), static_cast<std::size_t>(t[1][0]),
                                static_cast<std::size_t>(t[0][1]), static_cast<std::size_t>(t[1][1])};
  return chi2_from_cells(cells, 2, significance);
}

std::string_view to_string(PairCorrection c) noexcept { return c == PairCorrection::none ? "none" : "bonferroni"; }

PairCorrection parse_pair_correction(std::string_view text) {
  if (text == "none") return PairCorrection::none;
  if (text == "bonferroni") return PairCorrection::bonferroni;
  throw InputError("unknown pair correction '" + std::string(text) + "'");
}

PairwiseExchangeability chi2_exchangeability_pairwise(const BinaryDataset& data, std::span<const std::size_t> rows,
                                                      std::span<const VariableId> vars, double significance,
                                                      PairCorrection correction, double g_alpha, Execution exec) {
  const std::size_t n = vars.size();
  if (n < 2) throw InputError("pairwise exchangeability test needs at least two variables");
  if (rows.empty()) throw InputError("exchangeability test needs at least one row");
  if (!(significance > 0.0 && significance < 1.0)) throw InputError("significance must lie in (0, 1)");
  const auto counts = pairwise_counts(data, rows, vars, exec);
  PairwiseExchangeability out;
  out.pair_level =
      correction == PairCorrection::bonferroni ? significance / static_cast<double>(counts.size()) : significance;
  out.pairs.resize(counts.size());
  const auto np = static_cast<std::ptrdiff_t>(counts.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < np; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    out.pairs[idx].chi2 = chi2_exchangeability_pair(counts[idx], out.pair_level);
    out.pairs[idx].g = g_statistic(counts[idx], g_alpha);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      auto& d = out.pairs[pair_index(i, j, n)];
      d.a = vars[i];
      d.b = vars[j];
      if (!d.chi2.exchangeable) out.exchangeable = false;
    }
  return out;
}

}  // namespace xspn
