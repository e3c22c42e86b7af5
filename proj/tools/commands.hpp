#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stratree/dense_eigen.hpp"
#include "stratree/rojo.hpp"
#include "stratree/tree.hpp"

namespace stratree::cli {

enum class Format { json, csv };

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kInputError = 2, kResourceError = 3 };

struct RunConfig {
  std::string command;
  std::optional<std::string> children;  // comma list, may be empty
  std::optional<std::string> spec_path;
  std::vector<int> levels;              // cycles the children pattern
  Format format = Format::json;
  double tol = 1e-8;
  Eigen::Index oracle_cap = kDefaultOracleCap;
  Vertex basis_cap = kDefaultBasisCap;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> mtx_path;
};

using AnySpec = std::variant<SymmetricTreeSpec, GluedTreeSpec>;

std::vector<std::uint32_t> parse_children(const std::string& text);
AnySpec parse_spec_json(const std::string& text);
/// Resolves --children / --spec (and a single --levels value) to a spec.
AnySpec load_spec(const RunConfig& config);

/// Runs one command, writing the document to `out` and diagnostics to
/// `err`. Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace stratree::cli
