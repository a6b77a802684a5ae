#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rvopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// Monomials and graded-lexicographic order
// --------------------------------------------------------------------------

struct Monomial {
  std::vector<std::uint32_t> exponents;

  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exponents(nvars, 0) {}
  explicit Monomial(std::vector<std::uint32_t> e) : exponents(std::move(e)) {}

  std::uint32_t degree() const;
  std::size_t nvars() const { return exponents.size(); }
  bool operator==(const Monomial&) const = default;
};

Monomial operator+(const Monomial& a, const Monomial& b);

// Total degree first; ties broken so that earlier variables dominate:
// 1 < x1 < x2 < x1^2 < x1 x2 < x2^2 < ...
bool grlex_less(const Monomial& a, const Monomial& b);

struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return grlex_less(a, b);
  }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const;
};

// C(n + d, d), the number of monomials in n variables of degree <= d.
std::size_t basis_size(std::size_t nvars, std::uint32_t deg);

// All monomials of degree <= maxdeg in graded-lex order, with O(1) lookup of
// a monomial's index. This ordering is the single canonical indexing used by
// every matrix in the project.
class MonomialBasis {
 public:
  MonomialBasis(std::size_t nvars, std::uint32_t maxdeg);

  std::size_t size() const { return list_.size(); }
  std::size_t nvars() const { return nvars_; }
  std::uint32_t maxdeg() const { return maxdeg_; }
  const Monomial& operator[](std::size_t i) const { return list_[i]; }
  const std::vector<Monomial>& monomials() const { return list_; }

  std::optional<std::size_t> try_index_of(const Monomial& m) const;
  std::size_t index_of(const Monomial& m) const;  // throws Error if absent

 private:
  std::size_t nvars_;
  std::uint32_t maxdeg_;
  std::vector<Monomial> list_;
  std::unordered_map<Monomial, std::size_t, MonomialHash> index_;
};

// The spec-level basis(n, d) operation.
std::vector<Monomial> basis(std::size_t nvars, std::uint32_t deg);

// --------------------------------------------------------------------------
// Variable spaces
// --------------------------------------------------------------------------

struct VariableBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// An ordered list of named variables partitioned into contiguous named
// blocks (decision block "x", parameter blocks "u"/"v", auxiliaries).
// Immutable; shared by every polynomial over it.
class VariableSpace {
 public:
  using Ptr = std::shared_ptr<const VariableSpace>;

  static Ptr make(
      std::vector<std::pair<std::string, std::vector<std::string>>> blocks);
  // Convenience: one block with variables name1..name<count>.
  static Ptr make_flat(const std::string& block_name, std::size_t count,
                       const std::string& var_prefix);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<VariableBlock>& blocks() const { return blocks_; }
  const VariableBlock* find_block(std::string_view name) const;
  const VariableBlock& block(std::string_view name) const;  // throws
  std::optional<std::size_t> index_of(std::string_view var) const;
  bool same_as(const VariableSpace& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<VariableBlock> blocks_;
};

// --------------------------------------------------------------------------
// Sparse polynomials
// --------------------------------------------------------------------------

class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GrlexLess>;

  explicit Polynomial(VariableSpace::Ptr space) : space_(std::move(space)) {}
  static Polynomial constant(VariableSpace::Ptr space, double c);
  static Polynomial variable(VariableSpace::Ptr space, std::size_t index);
  static Polynomial monomial(VariableSpace::Ptr space, Monomial m, double c);

  const VariableSpace::Ptr& space() const { return space_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  // 0 for the zero polynomial by convention.
  std::uint32_t degree() const;
  std::uint32_t degree_in_block(std::string_view block) const;
  double coefficient(const Monomial& m) const;
  // Exact-zero coefficients are pruned; anything else is stored verbatim.
  void set_coefficient(Monomial m, double c);
  void add_term(const Monomial& m, double c);
  double max_abs_coefficient() const;

  double eval(std::span<const double> point) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double a);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    return mul(a, b);
  }
  static Polynomial mul(const Polynomial& a, const Polynomial& b);
  Polynomial pow(std::uint32_t k) const;

  // Substitutes numeric values for one block; the result lives on the space
  // with that block removed.
  Polynomial substitute_block(std::string_view block,
                              std::span<const double> values) const;
  // Re-expresses this polynomial over a larger space containing all of this
  // space's blocks (matched by name and size).
  Polynomial lift(VariableSpace::Ptr target) const;

  std::string to_string() const;

 private:
  void check_same_space(const Polynomial& o) const;

  VariableSpace::Ptr space_;
  TermMap terms_;
};

// Parses the textual polynomial syntax used by problem files: a sum of terms
// `coeff * var^k * ...`, e.g. "-2*x1^2*u1 + 0.5*x2 - 1". Throws Error with a
// column position on malformed input.
Polynomial parse_polynomial(VariableSpace::Ptr space, std::string_view text);

}  // namespace rvopt
