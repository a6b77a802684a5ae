#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rvopt/pipeline.hpp"

namespace rvopt::io {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line(line) {}
  std::size_t line;
};

// Line-oriented problem file with sections [variables], [objectives],
// [constraints], [set X], [set U], [set V]; '#' starts a comment. Unknown
// sections or keys are rejected. X must be a box or a ball; general U/V sets
// need a `bound` for the Archimedean witness.
pipeline::ProblemSpec parse_problem(const std::filesystem::path& path);
pipeline::ProblemSpec parse_problem_text(const std::string& text);
std::string serialize_problem(const pipeline::ProblemSpec& spec);

struct RunConfig {
  std::filesystem::path problem_path;
  std::filesystem::path out_dir = "out";
  std::vector<std::uint32_t> objective_degrees;   // empty => x-degree default
  std::vector<std::uint32_t> constraint_degrees;  // empty => x-degree default
  std::optional<std::uint32_t> approx_order;
  std::uint32_t hierarchy_extra = 3;
  std::string lambda_grid;  // "a:b:step" over lambda_1, or empty for default
  std::vector<std::uint32_t> p_list = {1, 2, 3, 4};
  bool include_chebyshev = false;
  std::vector<double> eps;
  std::uint64_t seed = 12345;
  double tol = 1e-8;
  std::size_t threads = 0;
  std::filesystem::path export_sdpa_dir;  // empty => no export
  bool quiet = false;
};

// Expands "a:b:step" into the two-objective lambda grid; validates bounds.
std::vector<std::vector<double>> parse_lambda_grid(const std::string& text,
                                                   std::size_t l);

// CSV with 12-significant-digit numbers, a JSON mirror and, for two
// objectives, a two-column plot-data file of the certified nondominated
// robust values.
void emit_records(const std::vector<pipeline::ParetoRecord>& records,
                  std::size_t l, std::size_t nx,
                  const std::filesystem::path& out_dir, double dominance_tol);

// Full pipeline run: 0 => at least one certified record, 2 => none,
// (fatal errors escape as exceptions; the CLI maps them to exit 1).
int run(const RunConfig& config);

}  // namespace rvopt::io
