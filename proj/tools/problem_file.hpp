#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entsplit/discrimination.hpp"
#include "entsplit/splitting.hpp"

namespace entsplit::cli {

/// Malformed, inconsistent or rank-deficient problem input. The message
/// carries the line or subspace label.
class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::optional<double> product_tol;
  std::optional<double> entangled_gap;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<int> restarts;
  std::optional<int> max_iters;
};

struct Problem {
  TensorSpace space;
  std::vector<std::string> labels;
  std::vector<Subspace> subspaces;
  std::vector<std::optional<std::vector<double>>> weights;
  Settings settings;

  Splitting splitting() const;
  StateSet state_set() const;
};

/// `source` names the input in error messages.
Problem parse_problem(const std::string& text, const std::string& source = "<input>");
Problem load_problem(const std::string& path);

/// Problem-file JSON for a splitting (orthonormal basis vectors as [re, im] pairs).
std::string export_problem(const Splitting& sp, int indent = 2);

}  // namespace entsplit::cli
