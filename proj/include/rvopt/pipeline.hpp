#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rvopt/hierarchy.hpp"
#include "rvopt/value_approx.hpp"

namespace rvopt::pipeline {

// Robust vector problem: minimize the worst case over u of each objective
// subject to the worst case over v of each constraint staying nonnegative.
// Objectives live on blocks (x, u), constraints on (x, v); the u/v sets are
// absent for uncertainty-free problems, in which case objectives/constraints
// are polynomials in x alone.
struct ProblemSpec {
  VariableSpace::Ptr x_space;  // single block "x"
  std::vector<Polynomial> objectives;
  std::vector<Polynomial> constraints;
  SetDescriptor x_set;  // box or ball (closed-form moments required)
  std::optional<SetDescriptor> u_set;
  std::optional<SetDescriptor> v_set;

  std::size_t num_objectives() const { return objectives.size(); }
  std::size_t num_constraints() const { return constraints.size(); }
  std::size_t nx() const { return x_space->size(); }
  bool objectives_uncertain() const { return u_set.has_value(); }
  bool constraints_uncertain() const { return v_set.has_value(); }
  void validate() const;
};

struct UtopiaPoint {
  std::vector<double> y_u;     // bounds - eps
  std::vector<double> bounds;  // pre-eps lower bounds of the ideal point
  std::vector<double> eps;     // strictly positive margins
};

struct ScalarizationConfig {
  std::vector<double> lambda;  // in the relative interior of the simplex
  std::uint32_t p = 1;
  bool chebyshev = false;  // sup-norm scalarization instead of finite p

  void validate(std::size_t l) const;
};

struct ParetoRecord {
  std::vector<double> x_star;
  std::vector<double> approx_values;  // Fbar_i(x*)
  std::vector<double> robust_values;  // certified sup_u f_i(x*, u)
  std::vector<double> lambda;
  std::uint32_t p = 1;
  bool chebyshev = false;
  bool certified = false;
};

struct CellDiagnostic {
  std::uint32_t p = 0;
  bool chebyshev = false;
  std::vector<double> lambda;
  bool ok = false;
  std::string message;
};

struct SweepOptions {
  // approximation degrees; empty entries default to the x-degree of the
  // corresponding polynomial
  std::vector<std::uint32_t> objective_degrees;
  std::vector<std::uint32_t> constraint_degrees;
  std::optional<std::uint32_t> approx_order;  // value-approx order override
  std::uint32_t hierarchy_extra_orders = 3;   // t_max = t_min + extra
  std::vector<std::vector<double>> lambda_grid;  // empty => default grid
  std::vector<std::uint32_t> p_list = {1, 2, 3, 4};
  bool include_chebyshev = false;
  std::vector<double> eps;  // empty => 0.05 * (1 + |bounds_i|)
  std::uint64_t seed = 12345;
  double sdp_tol = 1e-8;
  int sdp_max_iter = 200;
  double dominance_tol = 1e-6;
  double feas_tol = 1e-6;
  double rank_ratio = 1e-6;
  std::size_t threads = 0;               // 0 => hardware concurrency
  std::size_t degree_guard_rows = 500;   // abort cell when s(ceil(deg/2)) exceeds
  std::function<void(const SdpProblem&, const std::string& label)> export_hook;
};

struct SweepResult {
  std::vector<ParetoRecord> records;
  UtopiaPoint utopia;
  std::vector<Polynomial> fbar;  // over x_space
  std::vector<Polynomial> gbar;
  std::vector<std::optional<approx::ValueApprox>> fbar_info;  // null when exact
  std::vector<std::optional<approx::ValueApprox>> gbar_info;
  std::vector<CellDiagnostic> diagnostics;

  std::size_t certified_count() const;
};

// 17 points 0.05..0.85 for two objectives; a positive simplex lattice in
// general.
std::vector<std::vector<double>> default_lambda_grid(std::size_t l);

// Lower bounds of the ideal point: with parameters, the inner problem of the
// interchanged sup-min is approximated from below over the parameter set and
// then maximized; without parameters, a plain hierarchy lower bound.
UtopiaPoint utopia_point(const ProblemSpec& spec, std::vector<double> eps,
                         const SweepOptions& opts);

// Gamma_{lambda,p}(x) = sum_i (lambda_i (Fbar_i(x) - yU_i))^p.
Polynomial build_gamma(const std::vector<Polynomial>& fbar,
                       const std::vector<double>& y_u,
                       const ScalarizationConfig& cfg);

// Inner approximation of the robust feasible set: {Gbar_j >= 0} cut with the
// reference set's inequalities (plus an enclosing-ball witness).
SetDescriptor build_omega_bar(const ProblemSpec& spec,
                              const std::vector<Polynomial>& gbar);

hierarchy::Result solve_scalarized(const Polynomial& gamma,
                                   const SetDescriptor& omega_bar,
                                   const hierarchy::Options& opts);

// Epigraph form of the sup-norm scalarization over (x, aux); minimizers are
// reported in x alone.
hierarchy::Result chebyshev_scalarize(const std::vector<Polynomial>& fbar,
                                      const std::vector<double>& y_u,
                                      const std::vector<double>& lambda,
                                      const SetDescriptor& omega_bar,
                                      const hierarchy::Options& opts,
                                      std::uint64_t seed);

// Certified worst-case value of objective i at x*.
struct RobustValue {
  double value = 0.0;
  bool certified = false;
};
RobustValue robust_value(const ProblemSpec& spec, std::span<const double> x_star,
                         std::size_t i, const SweepOptions& opts);

SweepResult sweep(const ProblemSpec& spec, const SweepOptions& opts);

// Removes records whose robust-value vector is dominated (componentwise <=
// with one component better by more than tol); ties within tol are kept.
std::vector<ParetoRecord> pareto_filter(std::vector<ParetoRecord> records,
                                        double tol);

}  // namespace rvopt::pipeline
