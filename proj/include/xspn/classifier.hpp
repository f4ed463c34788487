#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "xspn/dataset.hpp"
#include "xspn/learner.hpp"
#include "xspn/network.hpp"

namespace xspn {

/// One network per class over the feature variables, plus class log-priors.
/// Classes are kept in ascending label order; "class index" refers to it.
struct GenerativeClassifier {
  std::vector<int> labels;
  std::vector<double> log_priors;
  std::vector<Network> networks;

  std::size_t classes() const noexcept { return labels.size(); }
  std::size_t variable_count() const noexcept { return networks.empty() ? 0 : networks.front().variable_count(); }
};

struct Prediction {
  std::size_t index = 0;  // class index of the argmax
  int label = 0;
  std::vector<double> posterior;
};

/// Priors are (c_y + alpha) / (N + alpha K) with hp.alpha. Class k is learned
/// from its own rows with seed derive_seed(hp.seed, k).
GenerativeClassifier fit_classifier(const BinaryDataset& features, std::span<const int> labels,
                                    const Hyperparams& hp);

/// Normalizes per-class log scores (log prior + log likelihood) into a
/// posterior; ties go to the smaller class index.
Prediction posterior_from_scores(std::span<const double> log_scores, std::span<const int> labels);

Prediction predict(const GenerativeClassifier& clf, std::span<const std::uint8_t> x);
std::vector<Prediction> predict_all(const GenerativeClassifier& clf, const BinaryDataset& data,
                                    Execution exec = Execution::parallel);

// Classifier files are JSON: {"format": "xspn-classifier", "version": 1,
// "classes": [{"label": 0, "log_prior": ..., "model": <model document>}, ...]}.
std::string to_classifier_text(const GenerativeClassifier& clf);
GenerativeClassifier parse_classifier_text(const std::string& text);
void save_classifier(const std::filesystem::path& path, const GenerativeClassifier& clf);
GenerativeClassifier load_classifier(const std::filesystem::path& path);

}  // namespace xspn
