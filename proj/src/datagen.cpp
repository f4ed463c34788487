#include "xspn/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "xspn/error.hpp"
#include "xspn/exchangeable_leaf.hpp"
#include "xspn/logmath.hpp"
#include "xspn/random.hpp"

namespace xspn {

std::string_view to_string(ConstraintKind k) noexcept {
  switch (k) {
    case ConstraintKind::threshold: return "threshold";
    case ConstraintKind::exact: return "exact";
    case ConstraintKind::parity: return "parity";
    case ConstraintKind::counting: return "counting";
  }
  return "?";
}

ConstraintKind parse_constraint_kind(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "threshold") return ConstraintKind::threshold;
  if (s == "exact") return ConstraintKind::exact;
  if (s == "parity") return ConstraintKind::parity;
  if (s == "counting") return ConstraintKind::counting;
  throw InputError("unknown constraint kind '" + std::string(text) + "'");
}

void ConstraintSpec::validate() const {
  if (n < 1) throw InputError("constraint needs n >= 1");
  switch (kind) {
    case ConstraintKind::threshold:
      if (bound == 0) throw InputError("threshold bound 0 is unsatisfiable (needs ones < bound)");
      if (bound > n) throw InputError("threshold bound must not exceed n");
      break;
    case ConstraintKind::counting:
      if (divisor < 2) throw InputError("divisor must be at least 2");
      if (residue >= divisor) throw InputError("residue must be smaller than the divisor");
      if (residue > n) throw InputError("counting constraint is unsatisfiable: residue exceeds n");
      break;
    case ConstraintKind::exact:
      if (divisor < 2) throw InputError("divisor must be at least 2");
      break;
    case ConstraintKind::parity:
      break;
  }
}

bool ConstraintSpec::accepts_count(std::size_t ones) const noexcept {
  switch (kind) {
    case ConstraintKind::threshold: return ones < bound;
    case ConstraintKind::exact: return ones % divisor == 0;
    case ConstraintKind::parity: return ones % 2 == 0;
    case ConstraintKind::counting: return ones % divisor == residue;
  }
  return false;
}

BigInt satisfying_count(const ConstraintSpec& spec) {
  spec.validate();
  BigInt total = 0;
  for (std::size_t k = 0; k <= spec.n; ++k)
    if (spec.accepts_count(k)) total += class_size(spec.n, k);
  return total;
}

double acceptance_rate(const ConstraintSpec& spec) {
  return std::exp(log_of(satisfying_count(spec)) - static_cast<double>(spec.n) * std::numbers::ln2);
}

double analytic_loglik(const ConstraintSpec& spec) { return -log_of(satisfying_count(spec)); }

namespace {

// Fills `out` with uniform bits; returns the number of ones.
std::size_t draw_bits(Xoshiro256& rng, std::uint8_t* out, std::size_t n) {
  std::size_t ones = 0;
  for (std::size_t j = 0; j < n; j += 64) {
    std::uint64_t word = rng();
    const std::size_t end = std::min(n, j + 64);
    for (std::size_t b = j; b < end; ++b, word >>= 1) {
      out[b] = static_cast<std::uint8_t>(word & 1u);
      ones += out[b];
    }
  }
  return ones;
}

template <typename Body>
void for_rows(std::size_t count, Execution exec, Body&& body) {
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

constexpr double kMinAcceptance = 1e-6;

}  // namespace

BinaryDataset generate_constraint(const ConstraintSpec& spec, std::size_t samples, std::uint64_t seed,
                                  Execution exec) {
  const double rate = acceptance_rate(spec);  // validates
  if (rate < kMinAcceptance)
    throw CapacityError("rejection sampling would accept only " + std::to_string(rate) +
                        " of draws; the limit is 1e-6");
  const std::size_t n = spec.n;
  std::vector<std::uint8_t> values(samples * n);
  for_rows(samples, exec, [&](std::size_t r) {
    Xoshiro256 rng(derive_seed(seed, r));
    std::uint8_t* row = values.data() + r * n;
    while (!spec.accepts_count(draw_bits(rng, row, n))) {
    }
  });
  return BinaryDataset(samples, n, std::move(values));
}

LabeledDataset generate_labeled(const ConstraintSpec& spec, std::size_t samples, std::uint64_t seed,
                                Execution exec) {
  spec.validate();
  const std::size_t n = spec.n;
  std::vector<std::uint8_t> values(samples * n);
  std::vector<int> labels(samples);
  for_rows(samples, exec, [&](std::size_t r) {
    Xoshiro256 rng(derive_seed(seed, r));
    labels[r] = spec.accepts_count(draw_bits(rng, values.data() + r * n, n)) ? 1 : 0;
  });
  return {BinaryDataset(samples, n, std::move(values)), std::move(labels)};
}

// ---------------------------------------------------------------- MEVM

void MevmSpec::validate() const {
  if (n == 0) throw InputError("MEVM needs at least one variable");
  if (components.empty() || mixture.size() != components.size())
    throw InputError("MEVM needs one mixture weight per component");
  double total = 0.0;
  for (double w : mixture) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("mixture weights must be finite and non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("mixture weights must sum to 1");
  for (std::size_t c = 0; c < components.size(); ++c) {
    std::vector<int> seen(n, 0);
    for (const auto& block : components[c].blocks) {
      if (block.vars.empty()) throw InputError("MEVM block is empty");
      for (VariableId v : block.vars) {
        if (v >= n) throw InputError("MEVM block variable out of range");
        ++seen[v];
      }
      ExchangeableLeaf(Scope(block.vars), block.weights);  // checks size and normalization
    }
    if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; }))
      throw InputError("blocks of component " + std::to_string(c) + " do not partition the variables");
  }
}

MevmSpec random_mevm(std::size_t n, std::size_t components, std::size_t blocks, std::uint64_t seed) {
  if (n == 0 || components == 0 || blocks == 0 || blocks > n)
    throw InputError("random MEVM needs n >= blocks >= 1 and at least one component");
  MevmSpec spec;
  spec.n = n;
  Xoshiro256 rng(seed);
  auto positive = [](Xoshiro256& g) { return 1.0 - g.uniform(); };  // (0, 1]
  double total = 0.0;
  for (std::size_t c = 0; c < components; ++c) total += spec.mixture.emplace_back(positive(rng));
  for (double& w : spec.mixture) w /= total;

  for (std::size_t c = 0; c < components; ++c) {
    Xoshiro256 g(derive_seed(seed, c + 1));
    std::vector<VariableId> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<VariableId>(i);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[g.below(i + 1)]);
    MevmComponent comp;
    std::size_t next = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t size = n / blocks + (b < n % blocks ? 1 : 0);
      MevmBlock block;
      block.vars.assign(order.begin() + static_cast<std::ptrdiff_t>(next),
                        order.begin() + static_cast<std::ptrdiff_t>(next + size));
      std::sort(block.vars.begin(), block.vars.end());
      next += size;
      std::vector<double> q(size + 1);
      double qsum = 0.0;
      for (double& v : q) qsum += v = positive(g);
      for (std::size_t t = 0; t <= size; ++t) block.weights.push_back(q[t] / qsum / binomial(size, t));
      comp.blocks.push_back(std::move(block));
    }
    spec.components.push_back(std::move(comp));
  }
  return spec;
}

BinaryDataset generate_mevm(const MevmSpec& spec, std::size_t samples, std::uint64_t seed, Execution exec) {
  spec.validate();
  // Cumulative class probabilities w_t C(n_b, t) per block.
  std::vector<std::vector<std::vector<double>>> cumulative(spec.components.size());
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    for (const auto& block : spec.components[c].blocks) {
      std::vector<double> cdf;
      double acc = 0.0;
      for (std::size_t t = 0; t < block.weights.size(); ++t)
        cdf.push_back(acc += block.weights[t] * binomial(block.vars.size(), t));
      cumulative[c].push_back(std::move(cdf));
    }
  }
  auto pick = [](const std::vector<double>& cdf, double u) {
    u *= cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
  };
  std::vector<double> mixture_cdf;
  double acc = 0.0;
  for (double w : spec.mixture) mixture_cdf.push_back(acc += w);

  const std::size_t n = spec.n;
  std::vector<std::uint8_t> values(samples * n, 0);
  for_rows(samples, exec, [&](std::size_t r) {
    Xoshiro256 rng(derive_seed(seed, r));
    std::uint8_t* row = values.data() + r * n;
    const std::size_t c = pick(mixture_cdf, rng.uniform());
    const auto& blocks = spec.components[c].blocks;
    std::vector<VariableId> pool;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const std::size_t t = pick(cumulative[c][b], rng.uniform());
      pool = blocks[b].vars;
      for (std::size_t i = 0; i < t; ++i) {
        std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
        row[pool[i]] = 1;
      }
    }
  });
  return BinaryDataset(samples, n, std::move(values));
}

std::vector<double> mevm_logliks(const MevmSpec& spec, const BinaryDataset& data) {
  spec.validate();
  if (data.cols() < spec.n) throw InputError("dataset has fewer columns than the MEVM");
  std::vector<double> out(data.rows());
  std::vector<double> terms(spec.components.size());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
      double v = safe_log(spec.mixture[c]);
      for (const auto& block : spec.components[c].blocks) {
        std::size_t t = 0;
        for (VariableId var : block.vars) t += data(r, var);
        v += safe_log(block.weights[t]);
      }
      terms[c] = v;
    }
    out[r] = log_sum_exp(terms);
  }
  return out;
}

double mevm_loglik(const MevmSpec& spec, const BinaryDataset& data) {
  if (data.rows() == 0) throw InputError("cannot average over an empty dataset");
  double total = 0.0;
  for (double v : mevm_logliks(spec, data)) total += v;
  return total / static_cast<double>(data.rows());
}

Network mevm_network(const MevmSpec& spec) {
  spec.validate();
  std::vector<Node> nodes;
  const Scope all = Scope::range(spec.n);
  auto component = [&](const MevmComponent& comp) -> NodeId {
    std::vector<NodeId> leaves;
    for (const auto& block : comp.blocks) {
      nodes.push_back(Node{Scope(block.vars), LeafNode{ExchangeableLeaf(Scope(block.vars), block.weights)}});
      leaves.push_back(static_cast<NodeId>(nodes.size() - 1));
    }
    if (leaves.size() == 1) return leaves.front();
    nodes.push_back(Node{all, ProductNode{std::move(leaves)}});
    return static_cast<NodeId>(nodes.size() - 1);
  };
  if (spec.components.size() == 1) {
    const NodeId root = component(spec.components.front());
    return Network(std::move(nodes), root, spec.n);
  }
  SumNode sum;
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    sum.children.push_back(component(spec.components[c]));
    sum.weights.push_back(spec.mixture[c]);
  }
  nodes.push_back(Node{all, std::move(sum)});
  const auto root = static_cast<NodeId>(nodes.size() - 1);
  return Network(std::move(nodes), root, spec.n);
}

}  // namespace xspn
