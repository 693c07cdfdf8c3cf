#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "oneshot/linear_model.hpp"

namespace oneshot {

class ProblemParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contents of a problem file. Complex files are realified on load and
/// the complex original is kept alongside.
struct ProblemFile {
  LinearProblem problem;
  std::optional<ComplexLinearProblem> complex_source;
  std::optional<Vector> sigma_exact;
  std::optional<Vector> sigma_initial;
};

/// JSON layout:
///   {"n_u": .., "n_sigma": .., "n_f": ..,
///    "B": [...], "M": [...], "H": [...], "F": [...],     // row-major, flat or nested
///    "complex": {"B": {"re": [...], "im": [...]}, ...},  // replaces the real blocks
///    "sigma_exact": [...], "sigma0": [...]}               // optional
/// Throws ProblemParseError on malformed input.
ProblemFile parse_problem_json(const std::string& text);
ProblemFile load_problem(const std::filesystem::path& path);

std::string problem_to_json(const LinearProblem& problem,
                            const std::optional<Vector>& sigma_exact = std::nullopt);

}  // namespace oneshot
