// xspn command-line tool. Reports go to stdout as key=value lines; diagnostics
// go to stderr. Exit codes: 0 ok, 2 usage, 3 data/schema error, 4 capacity.

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xspn/classifier.hpp"
#include "xspn/datagen.hpp"
#include "xspn/dataset.hpp"
#include "xspn/error.hpp"
#include "xspn/grid.hpp"
#include "xspn/inference.hpp"
#include "xspn/learner.hpp"
#include "xspn/model_io.hpp"
#include "xspn/random.hpp"
#include "xspn/stats.hpp"

using namespace xspn;

namespace {

struct HpFlags {
  std::string variant = "XSPN_TF";
  std::string exch_test = "pairwise";
  std::string pair_correction = "bonferroni";
  Hyperparams hp;

  void attach(CLI::App& cmd) {
    cmd.add_option("--variant", variant, "SPN, SPN_CLT, XSPN_T or XSPN_TF")->capture_default_str();
    cmd.add_option("--rho", hp.rho, "g-test threshold")->capture_default_str();
    cmd.add_option("--min-instances,-m", hp.min_instances, "minimum rows before a fallback leaf")
        ->capture_default_str();
    cmd.add_option("--p", hp.exch_significance, "exchangeability test significance")->capture_default_str();
    cmd.add_option("--alpha", hp.alpha, "Laplace smoothing")->capture_default_str();
    cmd.add_option("--seed", hp.seed, "random seed")->capture_default_str();
    cmd.add_option("--max-children", hp.max_children, "fan-out of sum and product nodes")->capture_default_str();
    cmd.add_option("--exch-test", exch_test, "pairwise or full")->capture_default_str();
    cmd.add_option("--pair-correction", pair_correction, "none or bonferroni (per-pair level p / pairs)")
        ->capture_default_str();
    cmd.add_option("--full-test-max-vars", hp.full_test_max_vars, "variable limit of the full test")
        ->capture_default_str();
    cmd.add_option("--test-rows", hp.exch_test_max_rows, "row subsample cap for the exchangeability test")
        ->capture_default_str();
  }

  Hyperparams resolve() {
    hp.variant = parse_variant(variant);
    hp.exch_test = parse_exchangeability_test(exch_test);
    hp.pair_correction = parse_pair_correction(pair_correction);
    hp.validate();
    return hp;
  }
};

void print_hp(const Hyperparams& hp, const std::string& prefix = "") {
  std::cout << prefix << "variant=" << to_string(hp.variant) << '\n'
            << prefix << "rho=" << hp.rho << '\n'
            << prefix << "min_instances=" << hp.min_instances << '\n'
            << prefix << "p=" << hp.exch_significance << '\n'
            << prefix << "alpha=" << hp.alpha << '\n'
            << prefix << "seed=" << hp.seed << '\n'
            << prefix << "max_children=" << hp.max_children << '\n'
            << prefix << "exch_test=" << to_string(hp.exch_test) << '\n'
            << prefix << "pair_correction=" << to_string(hp.pair_correction) << '\n'
            << prefix << "full_test_max_vars=" << hp.full_test_max_vars << '\n'
            << prefix << "test_rows=" << hp.exch_test_max_rows << '\n';
}

void print_summary(const Network& net) {
  const auto s = summarize(net);
  std::cout << "variables=" << net.variable_count() << '\n'
            << "nodes=" << s.nodes << '\n'
            << "sum_nodes=" << s.sums << '\n'
            << "product_nodes=" << s.products << '\n'
            << "leaf_nodes=" << s.leaves << '\n'
            << "parameters=" << s.parameters << '\n'
            << "depth=" << s.depth << '\n';
  for (const char* kind : {"bernoulli", "factorized", "exchangeable_counting", "chow_liu"}) {
    const auto it = s.leaf_census.find(std::string_view(kind));
    std::cout << "leaves." << kind << '=' << (it == s.leaf_census.end() ? 0 : it->second) << '\n';
  }
  const Node& root = net.node(net.root());
  std::string root_kind = std::holds_alternative<SumNode>(root.body)       ? "sum"
                          : std::holds_alternative<ProductNode>(root.body) ? "product"
                                                                           : std::string(leaf_kind(
                                                                                 std::get<LeafNode>(root.body)
                                                                                     .distribution));
  std::cout << "root_kind=" << root_kind << '\n';
}

Network load_valid_model(const std::string& path) {
  Network net = load_model(path);
  const auto violations = net.validate();
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw SchemaError("$.nodes[" + std::to_string(v.node) + "]: " + std::string(to_string(v.kind)) + ": " +
                      v.detail);
  }
  return net;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void configure_threads() {
  if (const char* env = std::getenv("XSPN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 0) throw InputError("XSPN_THREADS must be a non-negative integer");
    if (n > 0) omp_set_num_threads(static_cast<int>(n));
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::cout.precision(17);
  CLI::App app{"Exchangeability-aware sum-product networks"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  std::string kind;
  std::size_t n = 0, samples = 0, divisor = 5, residue = 0, bound = 0, components = 1, blocks = 4;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  bool labeled = false, header = false;
  gen->add_option("--kind", kind, "threshold, exact, parity, counting or mevm")->required();
  gen->add_option("--n", n, "variable count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--samples", samples, "row count")->required();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--divisor", divisor)->capture_default_str();
  gen->add_option("--residue", residue)->capture_default_str();
  gen->add_option("--bound", bound, "threshold: keep rows with fewer ones than this");
  gen->add_option("--components", components, "mevm mixture components")->capture_default_str();
  gen->add_option("--blocks", blocks, "mevm blocks per component")->capture_default_str();
  gen->add_flag("--labeled", labeled, "uniform rows labelled by the constraint (label in last column)");
  gen->add_flag("--header", header, "write a header line");
  gen->add_option("--out", gen_out, "output path")->required();

  // train
  auto* train = app.add_subcommand("train", "learn a network");
  std::string train_path, model_out, train_test;
  HpFlags train_hp;
  train->add_option("--train", train_path)->required();
  train->add_option("--model", model_out, "model output path")->required();
  train->add_option("--test", train_test, "optional test set for the report");
  train_hp.attach(*train);

  // eval
  auto* eval = app.add_subcommand("eval", "mean log-likelihood of a dataset");
  std::string eval_model, eval_data, eval_mask;
  eval->add_option("--model", eval_model)->required();
  eval->add_option("--data", eval_data)->required();
  eval->add_option("--marginal", eval_mask, "evidence mask file (1 = observed), one row or one per sample");

  // classify
  auto* cls = app.add_subcommand("classify", "train per-class networks and score a test set");
  std::string cls_train, cls_test, cls_save;
  int label_column = -1;
  HpFlags cls_hp;
  cls->add_option("--train", cls_train)->required();
  cls->add_option("--test", cls_test)->required();
  cls->add_option("--label-column", label_column, "label column; negative counts from the end")
      ->capture_default_str();
  cls->add_option("--save", cls_save, "write the classifier here");
  cls_hp.attach(*cls);

  // inspect
  auto* inspect = app.add_subcommand("inspect", "structure report for a model");
  std::string insp_model, insp_data;
  bool insp_tests = false;
  double insp_p = 0.05, insp_rho = 5.0, insp_alpha = 0.1;
  std::string insp_correction = "bonferroni";
  inspect->add_option("--model", insp_model)->required();
  inspect->add_flag("--tests", insp_tests, "replay root-level test diagnostics on --data");
  inspect->add_option("--data", insp_data);
  inspect->add_option("--p", insp_p)->capture_default_str();
  inspect->add_option("--rho", insp_rho)->capture_default_str();
  inspect->add_option("--pair-correction", insp_correction)->capture_default_str();
  inspect->add_option("--alpha", insp_alpha)->capture_default_str();

  // grid
  auto* grid = app.add_subcommand("grid", "hyperparameter grid selected by validation log-likelihood");
  std::string grid_train, grid_valid, grid_test, grid_model;
  HpFlags grid_hp;
  grid->add_option("--train", grid_train)->required();
  grid->add_option("--valid", grid_valid)->required();
  grid->add_option("--test", grid_test);
  grid->add_option("--model", grid_model, "write the selected model here");
  grid_hp.attach(*grid);

  // validate
  auto* val = app.add_subcommand("validate", "check structural invariants of a model");
  std::string val_model;
  val->add_option("--model", val_model)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    configure_threads();
    const auto start = std::chrono::steady_clock::now();

    if (*gen) {
      std::cout << "command=generate\nkind=" << kind << "\nn=" << n << "\nsamples=" << samples
                << "\nseed=" << gen_seed << '\n';
      if (kind == "mevm") {
        const auto spec = random_mevm(n, components, blocks, gen_seed);
        const auto data = generate_mevm(spec, samples, derive_seed(gen_seed, 1));
        write_dataset(gen_out, data, header);
        std::cout << "components=" << components << "\nblocks=" << blocks
                  << "\nsample_loglik=" << mevm_loglik(spec, data) << '\n';
      } else {
        ConstraintSpec spec{parse_constraint_kind(kind), n, divisor, residue, bound};
        std::cout << "divisor=" << divisor << "\nresidue=" << residue << "\nbound=" << bound << '\n';
        if (labeled) {
          write_labeled_dataset(gen_out, generate_labeled(spec, samples, gen_seed), header);
          std::cout << "labeled=1\n";
        } else {
          write_dataset(gen_out, generate_constraint(spec, samples, gen_seed), header);
          std::cout << "analytic_loglik=" << analytic_loglik(spec) << '\n';
        }
      }
      std::cout << "out=" << gen_out << '\n';
    } else if (*train) {
      const Hyperparams hp = train_hp.resolve();
      const auto data = read_dataset(train_path);
      LearnStats stats;
      const Network net = learn(data, hp, &stats);
      const double learn_seconds = seconds_since(start);
      save_model(model_out, net);
      std::cout << "command=train\ntrain=" << train_path << "\nmodel=" << model_out << '\n';
      print_hp(hp);
      std::cout << "train_rows=" << data.rows() << '\n';
      print_summary(net);
      std::cout << "train_loglik=" << mean_log_likelihood(net, data) << '\n';
      if (!train_test.empty()) std::cout << "test_loglik=" << mean_log_likelihood(net, read_dataset(train_test)) << '\n';
      std::cout << "exchangeability_tests=" << stats.exchangeability_tests
                << "\nexchangeable_by_test=" << stats.exchangeable_by_test
                << "\ndegenerate_fallbacks=" << stats.degenerate_fallbacks
                << "\nexchangeability_seconds=" << stats.exchangeability_seconds
                << "\nlearn_seconds=" << learn_seconds << '\n';
    } else if (*eval) {
      const Network net = load_valid_model(eval_model);
      const auto data = read_dataset(eval_data);
      std::cout << "command=eval\nmodel=" << eval_model << "\ndata=" << eval_data << "\nrows=" << data.rows() << '\n';
      if (eval_mask.empty()) {
        std::cout << "mean_loglik=" << mean_log_likelihood(net, data) << '\n';
      } else {
        const auto mask = read_dataset(eval_mask);
        const auto values = log_marginals(net, data, mask);
        double total = 0.0;
        for (double v : values) total += v;
        std::cout << "marginal=" << eval_mask << "\nmean_marginal_loglik="
                  << (values.empty() ? 0.0 : total / static_cast<double>(values.size())) << '\n';
      }
    } else if (*cls) {
      const Hyperparams hp = cls_hp.resolve();
      const auto tr = read_labeled_dataset(cls_train, label_column);
      const auto te = read_labeled_dataset(cls_test, label_column);
      const auto clf = fit_classifier(tr.features, tr.labels, hp);
      if (!cls_save.empty()) save_classifier(cls_save, clf);
      const auto predictions = predict_all(clf, te.features);
      std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // label -> (correct, total)
      std::size_t correct = 0;
      for (std::size_t i = 0; i < predictions.size(); ++i) {
        auto& entry = per_class[te.labels[i]];
        ++entry.second;
        if (predictions[i].label == te.labels[i]) {
          ++correct;
          ++entry.first;
        }
      }
      std::cout << "command=classify\ntrain=" << cls_train << "\ntest=" << cls_test
                << "\nlabel_column=" << label_column << '\n';
      print_hp(hp);
      std::cout << "classes=" << clf.classes() << "\ntest_rows=" << predictions.size() << "\naccuracy="
                << (predictions.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(predictions.size()))
                << '\n';
      for (std::size_t c = 0; c < clf.classes(); ++c) {
        const auto s = summarize(clf.networks[c]);
        std::cout << "class." << clf.labels[c] << ".log_prior=" << clf.log_priors[c] << "\nclass." << clf.labels[c]
                  << ".nodes=" << s.nodes << '\n';
      }
      for (const auto& [label, counts] : per_class)
        std::cout << "class." << label << ".test_rows=" << counts.second << "\nclass." << label
                  << ".recall=" << static_cast<double>(counts.first) / static_cast<double>(counts.second) << '\n';
    } else if (*inspect) {
      const Network net = load_valid_model(insp_model);
      std::cout << "command=inspect\nmodel=" << insp_model << '\n';
      print_summary(net);
      if (insp_tests) {
        if (insp_data.empty()) throw InputError("--tests needs --data");
        const auto data = read_dataset(insp_data);
        if (data.cols() < net.variable_count()) throw InputError("dataset has fewer columns than the model");
        const auto rows = all_rows(data.rows());
        std::vector<VariableId> vars(net.variable_count());
        for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = static_cast<VariableId>(i);
        const auto pw = chi2_exchangeability_pairwise(data, rows, vars, insp_p, parse_pair_correction(insp_correction), insp_alpha);
        std::cout << "tests.p=" << insp_p << "\ntests.pair_level=" << pw.pair_level
                  << "\ntests.pairwise_exchangeable=" << pw.exchangeable << '\n';
        for (const auto& d : pw.pairs)
          std::cout << "pair." << d.a << '.' << d.b << ".g=" << d.g << "\npair." << d.a << '.' << d.b
                    << ".chi2=" << d.chi2.statistic << "\npair." << d.a << '.' << d.b << ".p_value=" << d.chi2.p_value
                    << '\n';
        if (vars.size() <= kDefaultFullTestMaxVars) {
          const auto full = chi2_exchangeability_full(data, rows, vars, insp_p);
          std::cout << "tests.full_exchangeable=" << full.exchangeable << "\ntests.full_chi2=" << full.statistic
                    << "\ntests.full_dof=" << full.dof << "\ntests.full_p_value=" << full.p_value << '\n';
        }
        const auto groups = split_variables(data, rows, vars, insp_rho, insp_alpha);
        std::cout << "tests.rho=" << insp_rho << "\ntests.independent_groups=" << groups.size() << '\n';
      }
    } else if (*grid) {
      const Hyperparams base = grid_hp.resolve();
      const auto tr = read_dataset(grid_train);
      const auto va = read_dataset(grid_valid);
      const auto result = grid_search(tr, va, base);
      std::cout << "command=grid\ntrain=" << grid_train << "\nvalid=" << grid_valid << '\n';
      for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& pt = result.points[i];
        std::cout << "grid." << i << ".rho=" << pt.hp.rho << "\ngrid." << i << ".min_instances=" << pt.hp.min_instances
                  << "\ngrid." << i << ".p=" << pt.hp.exch_significance << "\ngrid." << i
                  << ".valid_loglik=" << pt.valid_loglik << "\ngrid." << i << ".nodes=" << pt.nodes << '\n';
      }
      std::cout << "best=" << result.best << '\n';
      print_hp(result.points[result.best].hp, "best.");
      std::cout << "valid_loglik=" << result.points[result.best].valid_loglik << '\n';
      print_summary(result.model);
      if (!grid_test.empty())
        std::cout << "test_loglik=" << mean_log_likelihood(result.model, read_dataset(grid_test)) << '\n';
      if (!grid_model.empty()) save_model(grid_model, result.model);
    } else if (*val) {
      const Network net = load_model(val_model);
      const auto violations = net.validate();
      std::cout << "command=validate\nmodel=" << val_model << "\nviolations=" << violations.size() << '\n';
      for (const auto& v : violations)
        std::cout << "violation.node=" << v.node << " kind=" << to_string(v.kind) << " detail=" << v.detail << '\n';
      std::cout << "valid=" << (violations.empty() ? 1 : 0) << '\n';
      return violations.empty() ? 0 : 3;
    }
    std::cout << "wall_seconds=" << seconds_since(start) << '\n';
    return 0;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return 4;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
