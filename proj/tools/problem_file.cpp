#include "problem_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "entsplit/errors.hpp"

namespace entsplit::cli {

using json = nlohmann::ordered_json;

namespace {

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

cplx parse_entry(const json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw ProblemError(where + ": entries must be [re, im] pairs");
}

template <class T>
std::optional<T> optional_field(const json& obj, const char* key, const std::string& source) {
  if (!obj.contains(key)) return std::nullopt;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ProblemError(source + ": settings." + key + " has the wrong type");
  }
}

}  // namespace

Splitting Problem::splitting() const { return Splitting(space, subspaces, labels); }

StateSet Problem::state_set() const {
  std::vector<MixedState> states;
  for (std::size_t i = 0; i < subspaces.size(); ++i) states.push_back(MixedState{subspaces[i], weights[i]});
  return StateSet(space, std::move(states), labels);
}

Problem parse_problem(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemError(source + ":" + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                       ": parse error: " + e.what());
  }
  if (!doc.is_object()) throw ProblemError(source + ": top level must be an object");
  if (!doc.contains("dims") || !doc["dims"].is_array()) throw ProblemError(source + ": missing \"dims\" array");
  std::vector<int> dims;
  for (const auto& d : doc["dims"]) {
    if (!d.is_number_integer()) throw ProblemError(source + ": dims must be integers");
    dims.push_back(d.get<int>());
  }
  std::optional<TensorSpace> space;
  try {
    space.emplace(dims);
  } catch (const std::exception& e) {
    throw ProblemError(source + ": " + e.what());
  }
  const Index d = space->total_dim();

  if (!doc.contains("subspaces") || !doc["subspaces"].is_array() || doc["subspaces"].empty()) {
    throw ProblemError(source + ": missing \"subspaces\" array");
  }
  Problem p{*space, {}, {}, {}, {}};
  std::size_t n = 0;
  for (const auto& s : doc["subspaces"]) {
    ++n;
    std::string label = "S" + std::to_string(n);
    if (s.contains("label")) {
      if (!s["label"].is_string()) throw ProblemError(source + ": subspace " + std::to_string(n) + ": label must be a string");
      label = s["label"].get<std::string>();
    }
    const std::string where = source + ": subspace '" + label + "'";
    if (!s.contains("vectors") || !s["vectors"].is_array() || s["vectors"].empty()) {
      throw ProblemError(where + ": missing \"vectors\"");
    }
    Matrix cols(d, static_cast<Index>(s["vectors"].size()));
    Index k = 0;
    for (const auto& v : s["vectors"]) {
      if (!v.is_array() || static_cast<Index>(v.size()) != d) {
        throw ProblemError(where + ": dimension mismatch: vector " + std::to_string(k + 1) + " has " +
                           std::to_string(v.is_array() ? v.size() : 0) + " entries, expected " + std::to_string(d));
      }
      for (Index f = 0; f < d; ++f) cols(f, k) = parse_entry(v[static_cast<std::size_t>(f)], where);
      ++k;
    }
    try {
      p.subspaces.push_back(orthonormalize(*space, cols));
    } catch (const RankDeficiencyError&) {
      throw ProblemError(where + ": rank deficiency: spanning vectors are linearly dependent");
    }
    std::optional<std::vector<double>> w;
    if (s.contains("weights")) {
      try {
        w = s["weights"].get<std::vector<double>>();
      } catch (const json::exception&) {
        throw ProblemError(where + ": weights must be an array of numbers");
      }
      try {
        MixedState{p.subspaces.back(), w}.validate();
      } catch (const std::exception& e) {
        throw ProblemError(where + ": " + e.what());
      }
    }
    p.weights.push_back(std::move(w));
    p.labels.push_back(std::move(label));
  }

  if (doc.contains("settings")) {
    const json& st = doc["settings"];
    if (!st.is_object()) throw ProblemError(source + ": settings must be an object");
    p.settings.product_tol = optional_field<double>(st, "product_tol", source);
    p.settings.entangled_gap = optional_field<double>(st, "entangled_gap", source);
    p.settings.seed = optional_field<std::uint64_t>(st, "seed", source);
    p.settings.samples = optional_field<int>(st, "samples", source);
    p.settings.restarts = optional_field<int>(st, "restarts", source);
    p.settings.max_iters = optional_field<int>(st, "max_iters", source);
  }
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

std::string export_problem(const Splitting& sp, int indent) {
  json doc;
  doc["dims"] = sp.space().dims();
  json subs = json::array();
  for (std::size_t i = 0; i < sp.size(); ++i) {
    json vectors = json::array();
    const Matrix& b = sp[i].basis();
    for (Index k = 0; k < b.cols(); ++k) {
      json v = json::array();
      for (Index f = 0; f < b.rows(); ++f) v.push_back({b(f, k).real(), b(f, k).imag()});
      vectors.push_back(std::move(v));
    }
    subs.push_back({{"label", sp.labels()[i]}, {"vectors", std::move(vectors)}});
  }
  doc["subspaces"] = std::move(subs);
  return doc.dump(indent);
}

}  // namespace entsplit::cli
