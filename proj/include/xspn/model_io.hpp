#pragma once

#include <filesystem>
#include <string>

#include "xspn/network.hpp"

namespace xspn {

// Model files are JSON documents:
//
//   {
//     "format": "xspn-model", "version": 1,
//     "exchangeable_smoothing": "class_counts_then_divide",
//     "variable_count": 5, "root": 0,
//     "nodes": [
//       {"id": 0, "kind": "product", "scope": [0,1,2,3,4], "children": [1, 2]},
//       {"id": 1, "kind": "leaf", "scope": [0,1,2,3], "leaf_kind": "exchangeable_counting",
//        "n": 4, "weights": [...]},
//       {"id": 2, "kind": "leaf", "scope": [4], "leaf_kind": "bernoulli", "p_one": 0.25}
//     ]
//   }
//
// Sum nodes carry "children" and "weights" (same order). Factorized leaves
// carry "p_one" as an array in scope order; Chow-Liu leaves carry "parents"
// (variable id, or -1 for the root) and "cpt" with rows
// [[P(0|pa=0), P(1|pa=0)], [P(0|pa=1), P(1|pa=1)]] per scope variable (the
// root has a single row). Every real number is written with 17 significant
// digits, so reading a file back reproduces the doubles exactly.
//
// "exchangeable_smoothing" records that smoothing is added to class counts
// before dividing by C(n, t).

std::string to_model_text(const Network& network);
/// Throws SchemaError whose message begins with the offending field path.
Network parse_model_text(const std::string& text);

void save_model(const std::filesystem::path& path, const Network& network);
Network load_model(const std::filesystem::path& path);

/// Decimal form with 17 significant digits (round-trips every finite double).
std::string format_real(double value);

}  // namespace xspn
