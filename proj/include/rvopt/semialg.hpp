#pragma once

#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "rvopt/poly.hpp"

namespace rvopt {

struct BoxShape {
  std::vector<double> lower, upper;
};

struct BallShape {
  std::vector<double> center;
  double radius = 0.0;
};

struct GeneralShape {
  // radius of the enclosing ball used for the auto-added Archimedean witness
  double bound = 0.0;
};

// A compact basic semialgebraic set {z : h_k(z) >= 0}. Box and ball shapes
// carry closed-form uniform moments; general sets get an Archimedean witness
// ball constraint appended from a user-supplied bound.
struct SetDescriptor {
  VariableSpace::Ptr space;
  std::vector<Polynomial> inequalities;
  std::variant<BoxShape, BallShape, GeneralShape> shape = GeneralShape{};
  std::optional<std::size_t> witness_index;  // position in `inequalities`

  std::size_t dim() const { return space->size(); }
  bool is_box() const { return std::holds_alternative<BoxShape>(shape); }
  bool is_ball() const { return std::holds_alternative<BallShape>(shape); }
};

// Box with per-variable quadratic constraints (z_i - l_i)(u_i - z_i) >= 0.
SetDescriptor make_box(VariableSpace::Ptr space, std::vector<double> lower,
                       std::vector<double> upper);
// Ball of the given radius: R^2 - ||z - c||^2 >= 0.
SetDescriptor make_ball(VariableSpace::Ptr space, std::vector<double> center,
                        double radius);
// General set; a ball constraint bound^2 - ||z||^2 >= 0 is appended as the
// Archimedean witness.
SetDescriptor make_general(VariableSpace::Ptr space,
                           std::vector<Polynomial> inequalities, double bound);

// Concatenates the inequality lists over the joint space (blocks of `a`
// followed by blocks of `b`).
SetDescriptor product_set(const SetDescriptor& a, const SetDescriptor& b);

// Joint space of two descriptors without touching their inequalities.
VariableSpace::Ptr joint_space(const VariableSpace& a, const VariableSpace& b);

// true iff every inequality evaluates >= -tol at the point.
bool membership(const SetDescriptor& s, std::span<const double> point, double tol);

// Radius of a ball around the origin certain to contain the set (exact for
// balls/boxes, the witness bound for general sets).
double enclosing_radius(const SetDescriptor& s);

// A point of the set: box/ball sampled uniformly, general sets by rejection
// inside the witness ball. Throws after too many rejected draws.
std::vector<double> sample_point(const SetDescriptor& s, std::mt19937_64& rng);

// Moments gamma_alpha = int z^alpha dphi of the uniform probability measure,
// indexed by basis(n, maxdeg). gamma_0 = 1.
std::vector<double> uniform_box_moments(const BoxShape& box, std::uint32_t maxdeg);
std::vector<double> uniform_ball_moments(std::size_t nvars, const BallShape& ball,
                                         std::uint32_t maxdeg);
// Dispatch on the descriptor's shape; throws for general sets.
std::vector<double> uniform_moments(const SetDescriptor& s, std::uint32_t maxdeg);

}  // namespace rvopt
