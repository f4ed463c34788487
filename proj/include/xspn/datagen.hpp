#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "xspn/combinatorics.hpp"
#include "xspn/dataset.hpp"
#include "xspn/network.hpp"
#include "xspn/stats.hpp"

namespace xspn {

// Synthetic data generators. Row i of every generated dataset is drawn from
// its own xoshiro256** stream seeded with derive_seed(seed, i) (see
// random.hpp), so output is identical across thread counts and a prefix of a
// larger dataset equals the smaller dataset with the same seed.

enum class ConstraintKind {
  threshold,  // ones < bound
  exact,      // ones % divisor == 0
  parity,     // ones even
  counting,   // ones % divisor == residue
};

std::string_view to_string(ConstraintKind k) noexcept;
ConstraintKind parse_constraint_kind(std::string_view text);

struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::exact;
  std::size_t n = 20;
  std::size_t divisor = 5;
  std::size_t residue = 0;
  std::size_t bound = 0;

  /// Throws InputError on invalid or unsatisfiable specs.
  void validate() const;
  bool accepts_count(std::size_t ones) const noexcept;
};

/// |S|, the number of satisfying assignments.
BigInt satisfying_count(const ConstraintSpec& spec);
/// |S| / 2^n.
double acceptance_rate(const ConstraintSpec& spec);
/// -ln |S|: the per-sample log-likelihood of the uniform law on S.
double analytic_loglik(const ConstraintSpec& spec);

/// N samples uniform on S by rejection from {0,1}^n. CapacityError when the
/// acceptance rate is below 1e-6.
BinaryDataset generate_constraint(const ConstraintSpec& spec, std::size_t samples, std::uint64_t seed,
                                  Execution exec = Execution::parallel);

/// N samples uniform on {0,1}^n, labelled 1 when the constraint holds and 0 otherwise.
LabeledDataset generate_labeled(const ConstraintSpec& spec, std::size_t samples, std::uint64_t seed,
                                Execution exec = Execution::parallel);

// ---------------------------------------------------------------- MEVM

/// Exchangeable block: `weights[t]` is the probability of each single
/// assignment with t ones, so sum_t weights[t] C(|vars|, t) = 1.
struct MevmBlock {
  std::vector<VariableId> vars;
  std::vector<double> weights;
};

struct MevmComponent {
  std::vector<MevmBlock> blocks;
};

/// Mixture of products of exchangeable blocks.
struct MevmSpec {
  std::size_t n = 0;
  std::vector<double> mixture;
  std::vector<MevmComponent> components;

  /// Throws InputError unless every component's blocks partition 0..n-1 and
  /// all weight vectors are normalized within 1e-9.
  void validate() const;
};

/// Random MEVM: each component shuffles the variables into `blocks` blocks
/// of near-equal size; class probabilities per block and the mixture weights
/// are independent uniform(0,1] draws normalized to sum to 1.
MevmSpec random_mevm(std::size_t n, std::size_t components, std::size_t blocks, std::uint64_t seed);

BinaryDataset generate_mevm(const MevmSpec& spec, std::size_t samples, std::uint64_t seed,
                            Execution exec = Execution::parallel);

/// Per-row log density of the mixture.
std::vector<double> mevm_logliks(const MevmSpec& spec, const BinaryDataset& data);
/// Mean of mevm_logliks.
double mevm_loglik(const MevmSpec& spec, const BinaryDataset& data);

/// The same distribution as a network: sum over products of exchangeable leaves.
Network mevm_network(const MevmSpec& spec);

}  // namespace xspn
