#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "rvopt/moment.hpp"
#include "rvopt/sdp.hpp"
#include "rvopt/semialg.hpp"

namespace rvopt::hierarchy {

struct Options {
  std::optional<std::uint32_t> t_min;  // default: the degree-driven bound
  std::optional<std::uint32_t> t_max;  // default: t_min + 3
  SdpSolverOptions sdp;
  double rank_ratio = 1e-6;
  double feas_tol = 1e-6;   // atom feasibility, per constraint
  double match_tol = 1e-5;  // |f(x*) - bound| <= match_tol * (1 + |bound|)
  std::uint64_t seed = 12345;
  // false runs every order in [t_min, t_max] even after certification,
  // filling bounds_by_order completely (monotonicity studies)
  bool stop_at_certified = true;
  // invoked on every assembled relaxation (SDPA export, diagnostics)
  std::function<void(const SdpProblem&, std::uint32_t order)> on_relaxation;
};

struct Relaxation {
  SdpProblem sdp;       // variable k <=> monomial k of basis(n, 2*order)
  std::uint32_t order;  // relaxation order t
};

// Moment-side relaxation of min f over K at order t: variables y over
// basis(n, 2t), objective L_y(f), M_t(y) and one localizing block per
// inequality PSD, y_0 = 1 as an equality row. Throws when t is below the
// degree bound of f or of any constraint.
Relaxation relax(const Polynomial& f, const SetDescriptor& k, std::uint32_t t);

// Smallest admissible relaxation order for f over K.
std::uint32_t min_order(const Polynomial& f, const SetDescriptor& k);

// ceil(deg g / 2) over the constraint set, >= 1; the rank-stabilization gap.
std::uint32_t constraint_halfdeg(const SetDescriptor& k);

struct Result {
  std::uint32_t order = 0;  // order that produced the reported bound
  double bound = -std::numeric_limits<double>::infinity();
  std::optional<AtomicMeasure> atoms;
  std::vector<std::vector<double>> minimizers;  // certified atoms, or fallback
  bool certified = false;
  bool infeasible = false;  // SDP infeasible: the set is empty at this order
  SdpStatus last_status = SdpStatus::NumericalFailure;
  std::string note;
  std::vector<double> bounds_by_order;  // raw per-order bounds, for monotonicity

  bool has_bound() const {
    return bound != -std::numeric_limits<double>::infinity() &&
           bound != std::numeric_limits<double>::infinity();
  }
};

// Runs orders t_min..t_max, certifying through flat truncation + extraction;
// stops at the first certified order. Falls back to the (projected) degree-1
// moment point with certified=false when no order certifies. Never reports
// an uncertified point as certified.
Result minimize(const Polynomial& f, const SetDescriptor& k, const Options& opts = {});
// maximize(f) = -minimize(-f) with the sign of all bounds flipped.
Result maximize(const Polynomial& f, const SetDescriptor& k, const Options& opts = {});

}  // namespace rvopt::hierarchy
