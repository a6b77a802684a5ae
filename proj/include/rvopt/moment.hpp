#pragma once

#include <optional>

#include "rvopt/linalg.hpp"
#include "rvopt/poly.hpp"

namespace rvopt {

// Pseudo-moment vector of degree 2d, indexed by MonomialBasis(n, 2d) in the
// canonical graded-lex order, normalized so that y_0 = 1.
struct TruncatedMomentSequence {
  VariableSpace::Ptr space;
  std::uint32_t degree = 0;  // = 2d
  std::vector<double> values;

  std::size_t nvars() const { return space->size(); }
  void check() const;  // throws on length mismatch or y_0 != 1
};

struct AtomicMeasure {
  struct Atom {
    std::vector<double> point;
    double weight;
  };
  std::vector<Atom> atoms;
};

// L_y(p) = sum_a p_a y_a. Throws when deg p exceeds the degree of y.
double riesz(const TruncatedMomentSequence& y, const Polynomial& p);

// M_d(y), entries y_{a+b} over basis(n, d). Requires degree(y) >= 2d.
la::Matrix moment_matrix(const TruncatedMomentSequence& y, std::uint32_t d);

// M_d(g y), entries sum_k g_k y_{a+b+k}. Requires degree(y) >= 2d + deg g.
la::Matrix localizing_matrix(const TruncatedMomentSequence& y,
                             const Polynomial& g, std::uint32_t d);

// Numerical rank: count of singular values >= ratio * largest.
std::size_t numerical_rank(const la::Matrix& sym, double ratio);

struct FlatTruncation {
  std::uint32_t t = 0;
  std::size_t rank = 0;
};

// Smallest t in [d0, degree/2] with rank M_{t-d0}(y) = rank M_t(y); absent
// when no order qualifies. d0 is ceil(deg g / 2) over the active constraint
// set (>= 1).
std::optional<FlatTruncation> flat_truncation(const TruncatedMomentSequence& y,
                                              std::uint32_t d0,
                                              double rank_ratio = 1e-6);

struct ExtractionOptions {
  double rank_ratio = 1e-6;
  std::uint64_t seed = 12345;
  double resynth_tol = 1e-5;  // moment mismatch allowed up to degree 2(t-d0)
  std::uint32_t d0 = 1;
};

// Minimizer extraction from a flat-truncated moment vector: rank-revealing
// factorization of M_t(y), column-echelon basis, per-variable multiplication
// matrices, simultaneous diagonalization through the Schur basis of a random
// (seeded) convex combination. Returns nullopt when pivoting degenerates,
// the Schur step fails, weights come out non-positive, or the re-synthesized
// moments disagree with y.
std::optional<AtomicMeasure> extract_atoms(const TruncatedMomentSequence& y,
                                           std::uint32_t t, std::size_t r,
                                           const ExtractionOptions& opts = {});

// Moments of a weighted sum of Dirac measures (used by tests and by the
// extraction validity check).
TruncatedMomentSequence synthesize_moments(const AtomicMeasure& mu,
                                           VariableSpace::Ptr space,
                                           std::uint32_t degree);

}  // namespace rvopt
