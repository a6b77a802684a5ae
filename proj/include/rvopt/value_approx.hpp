#pragma once

#include <functional>
#include <optional>
#include <span>

#include "rvopt/hierarchy.hpp"
#include "rvopt/moment.hpp"
#include "rvopt/semialg.hpp"

// One-sided polynomial approximation of parametric optimal values: for
// f(x, u) over a base set X (carrying the uniform reference measure) and a
// parameter set U, Upper produces a polynomial in x dominating
// sup_{u in U} f(x, u), Lower one dominated by inf. The approximation is
// optimal in L1(X, phi) at its degree; both sides of the SDP pair are solved
// at once and the coefficient vector is read off the marginal-pin
// multipliers.
namespace rvopt::approx {

enum class Direction { Upper, Lower };

// On ApproxError with order_too_small set, the truncated certificate module
// was too small: retry with a larger relaxation order.
class ApproxError : public Error {
 public:
  ApproxError(const std::string& msg, bool raise_order)
      : Error(msg), order_too_small(raise_order) {}
  bool order_too_small = false;
};

struct ValueApprox {
  Polynomial poly;  // over the base space
  Direction direction = Direction::Upper;
  std::uint32_t d = 0;      // approximation degree
  std::uint32_t order = 0;  // relaxation order used
  double integral = 0.0;    // sum_a coeff_a * gamma_a, the SDP objective
  // min over the sampled guarantee check of poly - f (Upper) or f - poly
  // (Lower); a clean solve keeps this above roughly -1e-8
  double guarantee_margin = 0.0;
};

struct Options {
  std::optional<std::uint32_t> order;  // default: degree bound + 1
  SdpSolverOptions sdp;
  std::uint64_t seed = 12345;
  std::size_t guarantee_samples = 100;
  double guarantee_tol = 1e-6;
  std::function<void(const SdpProblem&, std::uint32_t order)> on_relaxation;
};

// Degree-driven lower bound on the relaxation order, plus one slack order.
std::uint32_t default_order(const Polynomial& f, const SetDescriptor& base,
                            const SetDescriptor& param, std::uint32_t d);

ValueApprox upper_value_approx(const Polynomial& f, const SetDescriptor& base,
                               const SetDescriptor& param, std::uint32_t d,
                               const Options& opts = {});
ValueApprox lower_value_approx(const Polynomial& g, const SetDescriptor& base,
                               const SetDescriptor& param, std::uint32_t e,
                               const Options& opts = {});

// Moment side of the same SDP pair, exposed as a diagnostic: the x-marginal
// moments are pinned to gamma up to degree d, the objective is L_z(f).
struct MarginalDual {
  double objective = 0.0;
  TruncatedMomentSequence z;  // over the joint (base, param) space
};
MarginalDual dual_marginal(const Polynomial& f, const SetDescriptor& base,
                           const SetDescriptor& param, std::uint32_t d,
                           const Options& opts = {});

// Pointwise min (Upper) / max (Lower) over members; monotone in list prefix.
struct Envelope {
  std::vector<ValueApprox> members;
  Direction direction = Direction::Upper;
  double eval(std::span<const double> x) const;
};
Envelope monotone_envelope(std::vector<ValueApprox> members);

}  // namespace rvopt::approx
