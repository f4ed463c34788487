#include "xspn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "xspn/error.hpp"
#include "xspn/logmath.hpp"
#include "xspn/model_io.hpp"
#include "xspn/random.hpp"

namespace xspn {

GenerativeClassifier fit_classifier(const BinaryDataset& features, std::span<const int> labels,
                                    const Hyperparams& hp) {
  if (labels.size() != features.rows())
    throw InputError("got " + std::to_string(labels.size()) + " labels for " + std::to_string(features.rows()) +
                     " rows");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t r = 0; r < labels.size(); ++r) by_class[labels[r]].push_back(r);
  if (by_class.size() < 2)
    throw InputError("classification needs at least two classes; found " + std::to_string(by_class.size()));

  GenerativeClassifier clf;
  const double n = static_cast<double>(labels.size());
  const double k = static_cast<double>(by_class.size());
  std::size_t index = 0;
  for (const auto& [label, rows] : by_class) {
    Hyperparams class_hp = hp;
    class_hp.seed = derive_seed(hp.seed, index++);
    clf.labels.push_back(label);
    clf.log_priors.push_back(std::log((static_cast<double>(rows.size()) + hp.alpha) / (n + hp.alpha * k)));
    clf.networks.push_back(learn(features, rows, class_hp));
  }
  return clf;
}

Prediction posterior_from_scores(std::span<const double> log_scores, std::span<const int> labels) {
  if (log_scores.empty() || log_scores.size() != labels.size())
    throw InputError("need one score per class label");
  Prediction p;
  const double total = log_sum_exp(log_scores);
  p.posterior.resize(log_scores.size());
  for (std::size_t c = 0; c < log_scores.size(); ++c) {
    p.posterior[c] = std::isinf(total) ? 1.0 / static_cast<double>(log_scores.size()) : std::exp(log_scores[c] - total);
    if (log_scores[c] > log_scores[p.index]) p.index = c;
  }
  p.label = labels[p.index];
  return p;
}

Prediction predict(const GenerativeClassifier& clf, std::span<const std::uint8_t> x) {
  std::vector<double> scores(clf.classes());
  for (std::size_t c = 0; c < clf.classes(); ++c) scores[c] = clf.log_priors[c] + clf.networks[c].log_evaluate(x);
  return posterior_from_scores(scores, clf.labels);
}

std::vector<Prediction> predict_all(const GenerativeClassifier& clf, const BinaryDataset& data, Execution exec) {
  if (data.cols() < clf.variable_count())
    throw InputError("dataset has " + std::to_string(data.cols()) + " feature columns; classifier needs " +
                     std::to_string(clf.variable_count()));
  std::vector<Prediction> out(data.rows());
  const auto rows = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t r = 0; r < rows; ++r)
    out[static_cast<std::size_t>(r)] = predict(clf, data.row(static_cast<std::size_t>(r)));
  return out;
}

std::string to_classifier_text(const GenerativeClassifier& clf) {
  std::ostringstream o;
  o << "{\n\"format\": \"xspn-classifier\",\n\"version\": 1,\n\"classes\": [\n";
  for (std::size_t c = 0; c < clf.classes(); ++c) {
    o << (c ? ",\n" : "") << "{\"label\": " << clf.labels[c] << ", \"log_prior\": " << format_real(clf.log_priors[c])
      << ", \"model\":\n"
      << to_model_text(clf.networks[c]) << '}';
  }
  o << "\n]\n}\n";
  return o.str();
}

GenerativeClassifier parse_classifier_text(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$: expected an object");
  if (!doc.contains("format") || doc["format"] != "xspn-classifier")
    throw SchemaError("$.format: expected \"xspn-classifier\"");
  if (!doc.contains("classes") || !doc["classes"].is_array()) throw SchemaError("$.classes: expected an array");

  GenerativeClassifier clf;
  const json& classes = doc["classes"];
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const std::string path = "$.classes[" + std::to_string(c) + "]";
    const json& entry = classes[c];
    if (!entry.is_object()) throw SchemaError(path + ": expected an object");
    if (!entry.contains("label") || !entry["label"].is_number_integer())
      throw SchemaError(path + ".label: expected an integer");
    if (!entry.contains("log_prior") || !entry["log_prior"].is_number())
      throw SchemaError(path + ".log_prior: expected a number");
    if (!entry.contains("model")) throw SchemaError(path + ".model: missing field");
    clf.labels.push_back(entry["label"].get<int>());
    clf.log_priors.push_back(entry["log_prior"].get<double>());
    try {
      clf.networks.push_back(parse_model_text(entry["model"].dump()));
    } catch (const SchemaError& e) {
      std::string what = e.what();
      if (what.starts_with("$")) what.erase(0, 1);
      throw SchemaError(path + ".model" + what);
    }
  }
  if (clf.classes() < 2) throw SchemaError("$.classes: expected at least two classes");
  if (!std::is_sorted(clf.labels.begin(), clf.labels.end()) ||
      std::adjacent_find(clf.labels.begin(), clf.labels.end()) != clf.labels.end())
    throw SchemaError("$.classes: labels must be strictly ascending");
  for (std::size_t c = 1; c < clf.classes(); ++c)
    if (clf.networks[c].variable_count() != clf.networks[0].variable_count())
      throw SchemaError("$.classes[" + std::to_string(c) + "].model.variable_count: differs from class 0");
  return clf;
}

void save_classifier(const std::filesystem::path& path, const GenerativeClassifier& clf) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write classifier file '" + path.string() + "'");
  out << to_classifier_text(clf);
  if (!out) throw InputError("failed writing classifier file '" + path.string() + "'");
}

GenerativeClassifier load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open classifier file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_classifier_text(ss.str());
}

}  // namespace xspn
