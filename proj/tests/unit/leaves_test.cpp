#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "oracles.hpp"
#include "xspn/combinatorics.hpp"
#include "xspn/error.hpp"
#include "xspn/exchangeable_leaf.hpp"
#include "xspn/leaves.hpp"
#include "xspn/logmath.hpp"

using namespace xspn;
using testing::observed;
using testing::rows_of;

namespace {

// Linear-space marginal of one leaf by enumeration over its scope.
double enumerate_marginal(const LeafDistribution& leaf, const std::vector<std::int8_t>& e) {
  const std::size_t n = e.size();
  double total = 0.0;
  for (std::uint64_t i = 0; i < (1ULL << n); ++i) {
    const auto x = oracle::assignment(i, n);
    bool ok = true;
    for (std::size_t j = 0; j < n; ++j) ok = ok && (e[j] < 0 || e[j] == x[j]);
    if (ok) total += oracle::leaf_prob(leaf, x);
  }
  return total;
}

ExchangeableLeaf random_exchangeable(std::size_t n, Xoshiro256& rng) {
  std::vector<double> q(n + 1), w(n + 1);
  double s = 0.0;
  for (double& v : q) s += v = 0.01 + rng.uniform();
  for (std::size_t t = 0; t <= n; ++t) w[t] = q[t] / s / static_cast<double>(oracle::pascal(n, t));
  return ExchangeableLeaf(Scope::range(n), w);
}

std::vector<std::int8_t> random_evidence(std::size_t n, Xoshiro256& rng) {
  std::vector<std::int8_t> e(n);
  for (auto& v : e) v = static_cast<std::int8_t>(static_cast<int>(rng.below(3)) - 1);
  return e;
}

}  // namespace

TEST_CASE("exchangeable fit, closed-form cases") {
  const auto all = rows_of({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const auto leaf = ExchangeableLeaf::fit(all, all_rows(4), Scope::range(2), 0.0);
  for (double w : leaf.weights()) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(leaf.log_prob(observed({1, 0})) == doctest::Approx(std::log(0.25)));
  CHECK(leaf.log_marginal(std::vector<std::int8_t>{-1, -1}) == 0.0);
  CHECK(leaf.log_marginal(std::vector<std::int8_t>{-1, 1}) == doctest::Approx(std::log(0.5)).epsilon(1e-14));

  const auto ones = rows_of({{1, 1}, {1, 1}, {1, 1}});
  const auto point = ExchangeableLeaf::fit(ones, all_rows(3), Scope::range(2), 0.0);
  CHECK(std::vector<double>(point.weights().begin(), point.weights().end()) == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(point.log_prob(observed({0, 1})) == kNegInf);

  // Smoothed: class counts (0,0,3) -> (0.1, 0.1, 3.1) / 3.3, then / C(2,t).
  const auto smooth = ExchangeableLeaf::fit(ones, all_rows(3), Scope::range(2), 0.1);
  CHECK(smooth.weights()[0] == doctest::Approx(0.1 / 3.3).epsilon(1e-14));
  CHECK(smooth.weights()[1] == doctest::Approx(0.1 / 3.3 / 2).epsilon(1e-14));
  CHECK(smooth.weights()[2] == doctest::Approx(3.1 / 3.3).epsilon(1e-14));
  CHECK(smooth.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(ExchangeableLeaf(Scope::range(2), {0.5, 0.5, 0.5}), InputError);
  CHECK_THROWS_AS(ExchangeableLeaf(Scope::range(2), {0.5, 0.25}), InputError);
}

TEST_CASE("exchangeable fit converges to the generating distribution") {
  // Class probabilities for n=3.
  const double q[4] = {0.1, 0.3, 0.2, 0.4};
  Xoshiro256 rng(31);
  std::vector<std::uint8_t> v;
  const std::size_t N = 1000;
  for (std::size_t r = 0; r < N; ++r) {
    double u = rng.uniform();
    std::size_t t = 0;
    while (t < 3 && u >= q[t]) u -= q[t++];
    std::uint8_t x[3] = {0, 0, 0};
    std::vector<int> pos{0, 1, 2};
    for (std::size_t i = 0; i < t; ++i) std::swap(pos[i], pos[i + rng.below(3 - i)]), x[pos[i]] = 1;
    v.insert(v.end(), x, x + 3);
  }
  const BinaryDataset data(N, 3, v);
  const auto leaf = ExchangeableLeaf::fit(data, all_rows(N), Scope::range(3), 0.0);
  for (std::size_t t = 0; t <= 3; ++t) {
    const double share = leaf.weights()[t] * static_cast<double>(oracle::pascal(3, t));
    const double sd = std::sqrt(q[t] * (1 - q[t]) / N);
    CHECK(std::abs(share - q[t]) < 4 * sd);
  }
  CHECK(leaf.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exchangeable leaf properties on random leaves") {
  Xoshiro256 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    const auto leaf = random_exchangeable(n, rng);
    const LeafDistribution dist = leaf;

    double total = 0.0;
    for (std::uint64_t i = 0; i < (1ULL << n); ++i) total += std::exp(leaf.log_prob(observed(oracle::assignment(i, n))));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    const auto e = random_evidence(n, rng);
    const double want = enumerate_marginal(dist, e);
    CHECK(std::exp(leaf.log_marginal(e)) == doctest::Approx(want).epsilon(1e-9));

    // Marginalizing one more variable equals log-sum-exp of its two extensions.
    auto x = oracle::assignment(rng.below(1ULL << n), n);
    auto full = observed(x);
    const std::size_t j = rng.below(n);
    auto e0 = full, e1 = full, eu = full;
    e0[j] = 0, e1[j] = 1, eu[j] = -1;
    CHECK(leaf.log_marginal(eu) == doctest::Approx(log_add(leaf.log_marginal(e0), leaf.log_marginal(e1))).epsilon(1e-12));

    // Permutation invariance is exact.
    std::vector<std::uint8_t> y = x;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(y[i], y[rng.below(i + 1)]);
    CHECK(leaf.log_prob(observed(x)) == leaf.log_prob(observed(y)));
    CHECK(leaf.log_marginal(full) == leaf.log_prob(full));
  }
}

TEST_CASE("exchangeable fit ignores column order") {
  const auto data = testing::coin_flips(300, 5, 8, 0.3);
  const std::vector<VariableId> perm{3, 0, 4, 1, 2};
  const auto shuffled = data.select_columns(perm);
  const auto a = ExchangeableLeaf::fit(data, all_rows(300), Scope::range(5), 0.1);
  const auto b = ExchangeableLeaf::fit(shuffled, all_rows(300), Scope::range(5), 0.1);
  CHECK(std::equal(a.weights().begin(), a.weights().end(), b.weights().begin()));
}

TEST_CASE("bernoulli and factorized leaves") {
  const auto ones = rows_of({{1}, {1}, {1}, {1}});
  CHECK(BernoulliLeaf::fit(ones, all_rows(4), 0, 0.1).p_one() == doctest::Approx(4.1 / 4.2).epsilon(1e-15));
  const auto half = rows_of({{0}, {1}});
  CHECK(BernoulliLeaf::fit(half, all_rows(2), 0, 0.0).p_one() == 0.5);
  const auto zeros = rows_of({{0}, {0}, {0}});
  CHECK(BernoulliLeaf::fit(zeros, all_rows(3), 0, 0.1).p_one() == doctest::Approx(0.1 / 3.2).epsilon(1e-15));

  const BernoulliLeaf b(0, 0.3);
  CHECK(b.log_marginal(std::vector<std::int8_t>{0}) == doctest::Approx(std::log(0.7)).epsilon(1e-15));
  CHECK(b.log_marginal(std::vector<std::int8_t>{-1}) == 0.0);
  CHECK_THROWS_AS(BernoulliLeaf(0, 1.5), InputError);

  const FactorizedLeaf f({BernoulliLeaf(0, 0.2), BernoulliLeaf(2, 0.9)});
  CHECK(f.log_marginal(std::vector<std::int8_t>{-1, -1, -1}) == 0.0);
  CHECK(f.log_marginal(std::vector<std::int8_t>{1, -1, 0}) == doctest::Approx(std::log(0.2 * 0.1)).epsilon(1e-14));
}

TEST_CASE("chow-liu fit") {
  std::vector<std::uint8_t> v;
  Xoshiro256 rng(2);
  for (int r = 0; r < 500; ++r) {
    const std::uint8_t a = rng.uniform() < 0.4;
    v.insert(v.end(), {a, static_cast<std::uint8_t>(rng.uniform() < 0.5), a});
  }
  const BinaryDataset corr(500, 3, v);
  const auto leaf = ChowLiuLeaf::fit(corr, all_rows(500), Scope::range(3), 0.0);
  CHECK(leaf.root() == 0);
  CHECK(leaf.parent()[2] == 0);  // X2 copies X0
  CHECK(leaf.cpt()[2][1][1] == 1.0);
  CHECK(leaf.cpt()[2][0][0] == 1.0);

  // Same data, same tree and parameters.
  const auto again = ChowLiuLeaf::fit(corr, all_rows(500), Scope::range(3), 0.0);
  CHECK(std::equal(leaf.parent().begin(), leaf.parent().end(), again.parent().begin()));
  CHECK(std::equal(leaf.cpt().begin(), leaf.cpt().end(), again.cpt().begin()));

  // Tree log-likelihood never falls below the factorized one in-sample.
  const auto exhaustive = rows_of({{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 0, 0}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}});
  for (double alpha : {0.0, 0.1}) {
    const auto rows = all_rows(8);
    const auto clt = ChowLiuLeaf::fit(exhaustive, rows, Scope::range(3), alpha);
    const auto fac = FactorizedLeaf::fit(exhaustive, rows, Scope::range(3), alpha);
    double ll_clt = 0.0, ll_fac = 0.0;
    for (std::size_t r = 0; r < 8; ++r) {
      const auto x = observed({exhaustive.row(r).begin(), exhaustive.row(r).end()});
      ll_clt += clt.log_marginal(x);
      ll_fac += fac.log_marginal(x);
    }
    CHECK(ll_clt >= ll_fac - 1e-12);
  }
  const auto skew = rows_of({{0, 0, 0}, {0, 0, 1}, {1, 1, 0}, {1, 1, 1}, {1, 1, 1}, {0, 1, 0}, {1, 0, 1}, {0, 0, 0}});
  const auto clt = ChowLiuLeaf::fit(skew, all_rows(8), Scope::range(3), 0.0);
  const auto fac = FactorizedLeaf::fit(skew, all_rows(8), Scope::range(3), 0.0);
  double ll_clt = 0.0, ll_fac = 0.0;
  for (std::size_t r = 0; r < 8; ++r) {
    const auto x = observed({skew.row(r).begin(), skew.row(r).end()});
    ll_clt += clt.log_marginal(x);
    ll_fac += fac.log_marginal(x);
  }
  CHECK(ll_clt > ll_fac);

  // Independent fair columns: every cell near 1/8.
  const auto iid = testing::coin_flips(20000, 3, 12);
  const auto ind = ChowLiuLeaf::fit(iid, all_rows(20000), Scope::range(3), 0.1);
  for (std::uint64_t i = 0; i < 8; ++i)
    CHECK(std::abs(std::exp(ind.log_marginal(observed(oracle::assignment(i, 3)))) - 0.125) < 0.01);
}

TEST_CASE("chow-liu marginals match enumeration") {
  Xoshiro256 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(9);
    const auto data = testing::coin_flips(50 + rng.below(200), n, 100 + trial, 0.2 + 0.6 * rng.uniform());
    const LeafDistribution leaf = ChowLiuLeaf::fit(data, all_rows(data.rows()), Scope::range(n), 0.1);
    CHECK(enumerate_marginal(leaf, std::vector<std::int8_t>(n, -1)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(leaf_log_marginal(leaf, std::vector<std::int8_t>(n, -1)) == doctest::Approx(0.0));
    const auto e = random_evidence(n, rng);
    CHECK(std::exp(leaf_log_marginal(leaf, e)) == doctest::Approx(enumerate_marginal(leaf, e)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(ChowLiuLeaf(Scope::range(2), {-1, -1}, {ChowLiuLeaf::Table{{{0.5, 0.5}, {0.5, 0.5}}},
                                                           ChowLiuLeaf::Table{{{0.5, 0.5}, {0.5, 0.5}}}}),
                  InputError);
}

TEST_CASE("leaf parameter counts") {
  CHECK(leaf_parameter_count(BernoulliLeaf(0, 0.5)) == 1);
  CHECK(leaf_parameter_count(ExchangeableLeaf(Scope::range(4), {1.0 / 16, 1.0 / 16, 1.0 / 16, 1.0 / 16, 1.0 / 16})) == 5);
  CHECK(leaf_parameter_count(FactorizedLeaf({BernoulliLeaf(0, 0.5), BernoulliLeaf(1, 0.5)})) == 2);
  const auto data = testing::coin_flips(40, 3, 1);
  CHECK(leaf_parameter_count(ChowLiuLeaf::fit(data, all_rows(40), Scope::range(3), 0.1)) == 6);
}
