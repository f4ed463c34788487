#include "xspn/leaves.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

#include "xspn/error.hpp"
#include "xspn/logmath.hpp"

namespace xspn {

namespace {

bool observed_value(std::span<const std::int8_t> values, VariableId v, int& out) noexcept {
  if (v >= values.size() || values[v] < 0) return false;
  out = values[v];
  return true;
}

void check_fit_args(std::span<const std::size_t> rows, double alpha) {
  if (rows.empty()) throw InputError("leaf fit needs at least one row");
  if (alpha < 0.0) throw InputError("smoothing must be non-negative");
}

}  // namespace

// ---------------------------------------------------------------- Bernoulli

BernoulliLeaf::BernoulliLeaf(VariableId variable, double p_one)
    : variable_(variable), p_one_(p_one), log_one_(safe_log(p_one)), log_zero_(safe_log(1.0 - p_one)) {
  if (!(p_one >= 0.0 && p_one <= 1.0)) throw InputError("Bernoulli probability outside [0, 1]");
}

BernoulliLeaf BernoulliLeaf::fit(const BinaryDataset& data, std::span<const std::size_t> rows,
                                 VariableId variable, double alpha) {
  check_fit_args(rows, alpha);
  std::size_t ones = 0;
  for (std::size_t r : rows) ones += data(r, variable);
  const double p = (static_cast<double>(ones) + alpha) / (static_cast<double>(rows.size()) + 2.0 * alpha);
  return BernoulliLeaf(variable, p);
}

double BernoulliLeaf::log_marginal(std::span<const std::int8_t> values) const noexcept {
  int x = 0;
  if (!observed_value(values, variable_, x)) return 0.0;
  return x ? log_one_ : log_zero_;
}

// --------------------------------------------------------------- Factorized

namespace {

Scope scope_of(const std::vector<BernoulliLeaf>& factors) {
  std::vector<VariableId> v;
  v.reserve(factors.size());
  for (const auto& f : factors) v.push_back(f.variable());
  return Scope(std::move(v));
}

}  // namespace

FactorizedLeaf::FactorizedLeaf(std::vector<BernoulliLeaf> factors) : scope_(scope_of(factors)) {
  std::sort(factors.begin(), factors.end(),
            [](const BernoulliLeaf& a, const BernoulliLeaf& b) { return a.variable() < b.variable(); });
  factors_ = std::move(factors);
}

FactorizedLeaf FactorizedLeaf::fit(const BinaryDataset& data, std::span<const std::size_t> rows, const Scope& scope,
                                   double alpha) {
  std::vector<BernoulliLeaf> factors;
  factors.reserve(scope.size());
  for (VariableId v : scope) factors.push_back(BernoulliLeaf::fit(data, rows, v, alpha));
  return FactorizedLeaf(std::move(factors));
}

double FactorizedLeaf::log_marginal(std::span<const std::int8_t> values) const noexcept {
  double acc = 0.0;
  for (const auto& f : factors_) acc += f.log_marginal(values);
  return acc;
}

// ----------------------------------------------------------------- Chow-Liu

ChowLiuLeaf::ChowLiuLeaf(Scope scope, std::vector<int> parent, std::vector<Table> cpt)
    : scope_(std::move(scope)), parent_(std::move(parent)), cpt_(std::move(cpt)) {
  const std::size_t n = scope_.size();
  if (parent_.size() != n || cpt_.size() != n)
    throw InputError("Chow-Liu leaf needs one parent entry and one table per variable");

  std::vector<std::vector<std::size_t>> children(n);
  std::size_t roots = 0;
  std::size_t root = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (parent_[i] < 0) {
      ++roots;
      root = i;
    } else if (static_cast<std::size_t>(parent_[i]) >= n || static_cast<std::size_t>(parent_[i]) == i) {
      throw InputError("Chow-Liu parent index out of range");
    } else {
      children[static_cast<std::size_t>(parent_[i])].push_back(i);
    }
  }
  if (roots != 1) throw InputError("Chow-Liu parent map must have exactly one root");

  // Breadth-first from the root; a tree reaches every variable exactly once.
  order_.push_back(root);
  for (std::size_t head = 0; head < order_.size(); ++head)
    for (std::size_t c : children[order_[head]]) order_.push_back(c);
  if (order_.size() != n) throw InputError("Chow-Liu parent map is not connected");

  log_cpt_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < 2; ++a) {
      const auto& row = cpt_[i][a];
      if (!(row[0] >= 0.0 && row[1] >= 0.0) || std::abs(row[0] + row[1] - 1.0) > kRowTolerance)
        throw InputError("Chow-Liu table row for variable " + std::to_string(scope_[i]) + " does not sum to 1");
      log_cpt_[i][a] = {safe_log(row[0]), safe_log(row[1])};
    }
  }
}

ChowLiuLeaf ChowLiuLeaf::fit(const BinaryDataset& data, std::span<const std::size_t> rows, const Scope& scope,
                             double alpha) {
  check_fit_args(rows, alpha);
  const std::size_t n = scope.size();
  if (n < 2) throw InputError("Chow-Liu leaf needs at least two variables");
  const double total = static_cast<double>(rows.size());

  std::vector<double> ones(n, 0.0);
  std::vector<double> both(n * n, 0.0);  // both[i*n+j] = #(X_i = 1, X_j = 1)
  std::vector<std::uint8_t> buf(n);
  for (std::size_t r : rows) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = data(r, scope[i]);
    for (std::size_t i = 0; i < n; ++i) {
      if (!buf[i]) continue;
      ones[i] += 1.0;
      for (std::size_t j = i + 1; j < n; ++j) both[i * n + j] += buf[j];
    }
  }
  auto joint = [&](std::size_t i, std::size_t j) {
    // Table[a][b] = count(X_i = a, X_j = b) for i < j.
    const double c11 = both[i * n + j];
    Table t;
    t[1][1] = c11;
    t[1][0] = ones[i] - c11;
    t[0][1] = ones[j] - c11;
    t[0][0] = total - ones[i] - ones[j] + c11;
    return t;
  };

  struct Edge {
    double mi;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  const double denom = total + 4.0 * alpha;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Table c = joint(i, j);
      double p[2][2];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) p[a][b] = (c[a][b] + alpha) / denom;
      const double pi[2] = {p[0][0] + p[0][1], p[1][0] + p[1][1]};
      const double pj[2] = {p[0][0] + p[1][0], p[0][1] + p[1][1]};
      double mi = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (p[a][b] > 0.0) mi += p[a][b] * std::log(p[a][b] / (pi[a] * pj[b]));
      edges.push_back({mi, i, j});
    }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::make_tuple(-x.mi, x.i, x.j) < std::make_tuple(-y.mi, y.i, y.j);
  });

  std::vector<std::size_t> uf(n);
  std::iota(uf.begin(), uf.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  std::vector<std::vector<std::size_t>> adj(n);
  for (const Edge& e : edges) {
    std::size_t a = find(e.i), b = find(e.j);
    if (a == b) continue;
    uf[a] = b;
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }

  std::vector<int> parent(n, -2);
  parent[0] = -1;
  std::queue<std::size_t> q;
  q.push(0);
  while (!q.empty()) {
    std::size_t u = q.front();
    q.pop();
    std::sort(adj[u].begin(), adj[u].end());
    for (std::size_t v : adj[u])
      if (parent[v] == -2) {
        parent[v] = static_cast<int>(u);
        q.push(v);
      }
  }

  std::vector<Table> cpt(n);
  const double p1 = (ones[0] + alpha) / (total + 2.0 * alpha);
  cpt[0][0] = cpt[0][1] = {1.0 - p1, p1};
  for (std::size_t i = 1; i < n; ++i) {
    const auto pa = static_cast<std::size_t>(parent[i]);
    // counts[a][b] = #(X_pa = a, X_i = b)
    Table c = pa < i ? joint(pa, i) : joint(i, pa);
    if (pa > i)
      for (int a = 0; a < 2; ++a)
        for (int b = a + 1; b < 2; ++b) std::swap(c[a][b], c[b][a]);
    for (int a = 0; a < 2; ++a) {
      const double row = c[a][0] + c[a][1] + 2.0 * alpha;
      if (row == 0.0) {
        cpt[i][a] = {0.5, 0.5};  // parent value never seen and no smoothing
      } else {
        const double q1 = (c[a][1] + alpha) / row;
        cpt[i][a] = {1.0 - q1, q1};
      }
    }
  }
  return ChowLiuLeaf(scope, std::move(parent), std::move(cpt));
}

double ChowLiuLeaf::log_marginal(std::span<const std::int8_t> values) const {
  const std::size_t n = scope_.size();
  // below[i][b]: log-probability of the evidence in the subtree under i given X_i = b.
  std::vector<std::array<double, 2>> below(n, {0.0, 0.0});
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    const std::size_t i = *it;
    int x = 0;
    const bool obs = observed_value(values, scope_[i], x);
    if (parent_[i] < 0) {
      double acc = kNegInf;
      for (int b = 0; b < 2; ++b)
        if (!obs || b == x) acc = log_add(acc, log_cpt_[i][0][b] + below[i][b]);
      return acc;
    }
    auto& up = below[static_cast<std::size_t>(parent_[i])];
    for (int a = 0; a < 2; ++a) {
      double acc = kNegInf;
      for (int b = 0; b < 2; ++b)
        if (!obs || b == x) acc = log_add(acc, log_cpt_[i][a][b] + below[i][b]);
      up[a] += acc;
    }
  }
  return 0.0;  // unreachable: the root is processed last
}

// ------------------------------------------------------------------ variant

Scope leaf_scope(const LeafDistribution& leaf) {
  return std::visit([](const auto& l) { return Scope(l.scope()); }, leaf);
}

double leaf_log_marginal(const LeafDistribution& leaf, std::span<const std::int8_t> values) {
  return std::visit([&](const auto& l) { return l.log_marginal(values); }, leaf);
}

std::string_view leaf_kind(const LeafDistribution& leaf) noexcept {
  struct Kind {
    std::string_view operator()(const BernoulliLeaf&) const { return "bernoulli"; }
    std::string_view operator()(const FactorizedLeaf&) const { return "factorized"; }
    std::string_view operator()(const ExchangeableLeaf&) const { return "exchangeable_counting"; }
    std::string_view operator()(const ChowLiuLeaf&) const { return "chow_liu"; }
  };
  return std::visit(Kind{}, leaf);
}

std::size_t leaf_parameter_count(const LeafDistribution& leaf) noexcept {
  struct Count {
    std::size_t operator()(const BernoulliLeaf&) const { return 1; }
    std::size_t operator()(const FactorizedLeaf& l) const { return l.factors().size(); }
    std::size_t operator()(const ExchangeableLeaf& l) const { return l.size() + 1; }
    std::size_t operator()(const ChowLiuLeaf& l) const { return 2 * l.scope().size(); }
  };
  return std::visit(Count{}, leaf);
}

}  // namespace xspn
