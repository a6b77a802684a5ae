#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rvopt/linalg.hpp"

namespace rvopt {

// One symmetric coefficient entry of a block: value at (i, j) and, when
// i != j, implicitly also at (j, i). var == kConstTerm addresses the
// constant matrix A_0.
struct SdpEntry {
  int var;  // 0-based variable index, or kConstTerm
  int i, j;
  double value;
  static constexpr int kConstTerm = -1;
};

struct SdpBlock {
  int size = 0;
  std::vector<SdpEntry> entries;
};

// Sparse linear equality sum_k coeffs[k].second * y[coeffs[k].first] = rhs.
struct SdpLinearEq {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
};

// min c^T y  s.t.  A_0 + sum_k y_k A_k  PSD (per block),  E y = d.
struct SdpProblem {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<SdpBlock> blocks;
  std::vector<SdpLinearEq> equalities;

  void validate() const;  // throws Error on malformed data
};

enum class SdpStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasible,
  MaxIterations,
  NumericalFailure,
};

const char* to_string(SdpStatus s);

struct SdpSolution {
  std::vector<double> y;
  std::vector<la::Matrix> block_duals;  // X blocks (PSD at optimality)
  std::vector<double> eq_duals;         // multipliers of the equality rows
  SdpStatus status = SdpStatus::NumericalFailure;
  double gap = 0.0;           // relative duality gap at termination
  double primal_obj = 0.0;    // c^T y
  double dual_obj = 0.0;      // -<A_0, X> + d^T mu
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

struct SdpSolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.9;    // fraction of the max step to the boundary
  double schur_regularization = 1e-9;
  double init_scale = 0.0;       // 0 => derived from the data norms
  bool trace = false;            // iteration log on stderr
};

// Primal-dual path-following interior-point method (predictor-corrector)
// with a dense Schur complement; sized for desk-scale problems
// (block sizes <= ~300, <= ~3000 variables).
SdpSolution solve_sdp(const SdpProblem& p, const SdpSolverOptions& opts = {});

// SDPA sparse format (.dat-s). Equalities are encoded as paired entries of a
// trailing diagonal block and announced in a comment line so that
// import_sdpa() reconstructs them exactly. Floats carry 17 significant
// digits; import(export(p)) is structurally identical to p.
std::string export_sdpa(const SdpProblem& p);
SdpProblem import_sdpa(const std::string& text);

// Structural equality used by round-trip tests: identical dimensions, block
// sizes, equality rows and sorted coefficient entries (values within atol).
bool structurally_equal(const SdpProblem& a, const SdpProblem& b,
                        double atol = 0.0);

}  // namespace rvopt
