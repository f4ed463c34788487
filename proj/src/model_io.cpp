#include "xspn/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "xspn/error.hpp"

namespace xspn {

using nlohmann::json;

std::string format_real(double value) {
  if (!std::isfinite(value)) throw InputError("cannot serialize a non-finite number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

// ------------------------------------------------------------------ writing

class Writer {
 public:
  std::string str() const { return out_.str(); }

  void reals(std::span<const double> v) {
    out_ << '[';
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? ", " : "") << format_real(v[i]);
    out_ << ']';
  }
  template <typename Int>
  void ints(std::span<const Int> v) {
    out_ << '[';
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? ", " : "") << v[i];
    out_ << ']';
  }
  std::ostringstream& raw() { return out_; }

 private:
  std::ostringstream out_;
};

void write_leaf(Writer& w, const LeafDistribution& leaf) {
  auto& o = w.raw();
  o << ", \"leaf_kind\": \"" << leaf_kind(leaf) << '"';
  if (const auto* b = std::get_if<BernoulliLeaf>(&leaf)) {
    o << ", \"p_one\": " << format_real(b->p_one());
  } else if (const auto* f = std::get_if<FactorizedLeaf>(&leaf)) {
    std::vector<double> p;
    for (const auto& factor : f->factors()) p.push_back(factor.p_one());
    o << ", \"p_one\": ";
    w.reals(p);
  } else if (const auto* e = std::get_if<ExchangeableLeaf>(&leaf)) {
    o << ", \"n\": " << e->size() << ", \"weights\": ";
    w.reals(e->weights());
  } else {
    const auto& c = std::get<ChowLiuLeaf>(leaf);
    std::vector<long> parents;
    for (int p : c.parent()) parents.push_back(p < 0 ? -1 : static_cast<long>(c.scope()[static_cast<std::size_t>(p)]));
    o << ", \"parents\": ";
    w.ints(std::span<const long>(parents));
    o << ", \"cpt\": [";
    for (std::size_t i = 0; i < c.cpt().size(); ++i) {
      o << (i ? ", " : "") << '[';
      const auto& t = c.cpt()[i];
      const std::size_t rows = c.parent()[i] < 0 ? 1 : 2;
      for (std::size_t a = 0; a < rows; ++a) {
        o << (a ? ", " : "");
        w.reals(t[a]);
      }
      o << ']';
    }
    o << ']';
  }
}

// ------------------------------------------------------------------ reading

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw SchemaError(path + ": " + what); }

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

long long as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

std::size_t as_index(const json& v, const std::string& path) {
  long long x = as_int(v, path);
  if (x < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

std::vector<double> real_array(const json& v, const std::string& path) {
  std::vector<double> out;
  const json& arr = as_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_real(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::size_t> index_array(const json& v, const std::string& path) {
  std::vector<std::size_t> out;
  const json& arr = as_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_index(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Scope read_scope(const json& v, const std::string& path) {
  auto idx = index_array(v, path);
  std::vector<VariableId> vars(idx.begin(), idx.end());
  if (!std::is_sorted(vars.begin(), vars.end())) fail(path, "scope must be ascending");
  try {
    return Scope(std::move(vars));
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

LeafDistribution read_leaf(const json& obj, const std::string& path, const Scope& scope) {
  const json& kind_v = field(obj, path, "leaf_kind");
  if (!kind_v.is_string()) fail(path + ".leaf_kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();
  try {
    if (kind == "bernoulli") {
      if (scope.size() != 1) fail(path + ".scope", "bernoulli leaf needs a single variable");
      return BernoulliLeaf(scope[0], as_real(field(obj, path, "p_one"), path + ".p_one"));
    }
    if (kind == "factorized") {
      auto p = real_array(field(obj, path, "p_one"), path + ".p_one");
      if (p.size() != scope.size()) fail(path + ".p_one", "expected one probability per scope variable");
      std::vector<BernoulliLeaf> factors;
      for (std::size_t i = 0; i < p.size(); ++i) factors.emplace_back(scope[i], p[i]);
      return FactorizedLeaf(std::move(factors));
    }
    if (kind == "exchangeable_counting") {
      const std::size_t n = as_index(field(obj, path, "n"), path + ".n");
      if (n != scope.size()) fail(path + ".n", "does not match the scope size");
      return ExchangeableLeaf(scope, real_array(field(obj, path, "weights"), path + ".weights"));
    }
    if (kind == "chow_liu") {
      const json& parents = as_array(field(obj, path, "parents"), path + ".parents");
      const json& cpt = as_array(field(obj, path, "cpt"), path + ".cpt");
      if (parents.size() != scope.size() || cpt.size() != scope.size())
        fail(path, "chow_liu parents and cpt need one entry per scope variable");
      std::vector<int> parent;
      std::vector<ChowLiuLeaf::Table> tables(scope.size());
      for (std::size_t i = 0; i < scope.size(); ++i) {
        const std::string pp = path + ".parents[" + std::to_string(i) + "]";
        const long long pv = as_int(parents[i], pp);
        if (pv < 0) {
          parent.push_back(-1);
        } else {
          auto it = std::lower_bound(scope.begin(), scope.end(), static_cast<VariableId>(pv));
          if (it == scope.end() || *it != static_cast<VariableId>(pv)) fail(pp, "parent is not in the scope");
          parent.push_back(static_cast<int>(it - scope.begin()));
        }
        const std::string cp = path + ".cpt[" + std::to_string(i) + "]";
        const json& rows = as_array(cpt[i], cp);
        const std::size_t want = pv < 0 ? 1 : 2;
        if (rows.size() != want) fail(cp, "expected " + std::to_string(want) + " rows");
        for (std::size_t a = 0; a < want; ++a) {
          auto row = real_array(rows[a], cp + "[" + std::to_string(a) + "]");
          if (row.size() != 2) fail(cp + "[" + std::to_string(a) + "]", "expected 2 entries");
          tables[i][a] = {row[0], row[1]};
        }
        if (want == 1) tables[i][1] = tables[i][0];
      }
      return ChowLiuLeaf(scope, std::move(parent), std::move(tables));
    }
  } catch (const InputError& e) {
    fail(path, e.what());
  }
  fail(path + ".leaf_kind", "unknown leaf kind '" + kind + "'");
}

}  // namespace

std::string to_model_text(const Network& network) {
  Writer w;
  auto& o = w.raw();
  o << "{\n  \"format\": \"xspn-model\",\n  \"version\": 1,\n"
    << "  \"exchangeable_smoothing\": \"class_counts_then_divide\",\n"
    << "  \"variable_count\": " << network.variable_count() << ",\n  \"root\": " << network.root()
    << ",\n  \"nodes\": [";
  for (NodeId id = 0; id < network.size(); ++id) {
    const Node& n = network.node(id);
    o << (id ? ",\n" : "\n") << "    {\"id\": " << id << ", \"kind\": \"";
    if (std::holds_alternative<SumNode>(n.body))
      o << "sum";
    else if (std::holds_alternative<ProductNode>(n.body))
      o << "product";
    else
      o << "leaf";
    o << "\", \"scope\": ";
    w.ints(n.scope.variables());
    if (const auto* s = std::get_if<SumNode>(&n.body)) {
      o << ", \"children\": ";
      w.ints(std::span<const NodeId>(s->children));
      o << ", \"weights\": ";
      w.reals(s->weights);
    } else if (const auto* p = std::get_if<ProductNode>(&n.body)) {
      o << ", \"children\": ";
      w.ints(std::span<const NodeId>(p->children));
    } else {
      write_leaf(w, std::get<LeafNode>(n.body).distribution);
    }
    o << '}';
  }
  o << "\n  ]\n}\n";
  return w.str();
}

Network parse_model_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: not valid JSON: ") + e.what());
  }
  const std::string root_path = "$";
  const json& format = field(doc, root_path, "format");
  if (!format.is_string() || format.get<std::string>() != "xspn-model")
    fail("$.format", "expected \"xspn-model\"");
  const std::size_t variable_count = as_index(field(doc, root_path, "variable_count"), "$.variable_count");
  const std::size_t root = as_index(field(doc, root_path, "root"), "$.root");
  const json& nodes_v = as_array(field(doc, root_path, "nodes"), "$.nodes");

  std::vector<std::optional<Node>> slots(nodes_v.size());
  for (std::size_t i = 0; i < nodes_v.size(); ++i) {
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    const json& obj = nodes_v[i];
    const std::size_t id = as_index(field(obj, path, "id"), path + ".id");
    if (id >= slots.size()) fail(path + ".id", "id exceeds node count");
    if (slots[id]) fail(path + ".id", "duplicate node id");
    const json& kind_v = field(obj, path, "kind");
    if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
    const std::string kind = kind_v.get<std::string>();
    Scope scope = read_scope(field(obj, path, "scope"), path + ".scope");

    auto child_ids = [&]() {
      auto idx = index_array(field(obj, path, "children"), path + ".children");
      return std::vector<NodeId>(idx.begin(), idx.end());
    };
    if (kind == "sum") {
      SumNode s{child_ids(), real_array(field(obj, path, "weights"), path + ".weights")};
      if (s.weights.size() != s.children.size()) fail(path + ".weights", "expected one weight per child");
      slots[id] = Node{std::move(scope), std::move(s)};
    } else if (kind == "product") {
      slots[id] = Node{std::move(scope), ProductNode{child_ids()}};
    } else if (kind == "leaf") {
      LeafDistribution leaf = read_leaf(obj, path, scope);
      slots[id] = Node{std::move(scope), LeafNode{std::move(leaf)}};
    } else {
      fail(path + ".kind", "unknown node kind '" + kind + "'");
    }
  }
  std::vector<Node> nodes;
  nodes.reserve(slots.size());
  for (auto& s : slots) nodes.push_back(std::move(*s));  // ids are a permutation of 0..size-1
  if (root >= nodes.size()) fail("$.root", "root id does not exist");
  return Network(std::move(nodes), static_cast<NodeId>(root), variable_count);
}

void save_model(const std::filesystem::path& path, const Network& network) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file '" + path.string() + "'");
  out << to_model_text(network);
  if (!out) throw InputError("failed writing model file '" + path.string() + "'");
}

Network load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str());
}

}  // namespace xspn
