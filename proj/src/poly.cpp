#include "rvopt/poly.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace rvopt {

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (auto e : exponents) d += e;
  return d;
}

Monomial operator+(const Monomial& a, const Monomial& b) {
  if (a.nvars() != b.nvars()) throw Error("monomial dimension mismatch");
  Monomial r(a.nvars());
  for (std::size_t i = 0; i < a.nvars(); ++i)
    r.exponents[i] = a.exponents[i] + b.exponents[i];
  return r;
}

bool grlex_less(const Monomial& a, const Monomial& b) {
  const auto da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  // same degree: the monomial with more weight on earlier variables comes
  // first, i.e. lexicographically larger exponent vectors sort earlier
  for (std::size_t i = 0; i < a.nvars(); ++i) {
    if (a.exponents[i] != b.exponents[i]) return a.exponents[i] > b.exponents[i];
  }
  return false;
}

std::size_t MonomialHash::operator()(const Monomial& m) const {
  std::size_t h = 1469598103934665603ull;
  for (auto e : m.exponents) {
    h ^= e;
    h *= 1099511628211ull;
  }
  return h;
}

std::size_t basis_size(std::size_t nvars, std::uint32_t deg) {
  // C(n + d, d) computed incrementally
  std::size_t r = 1;
  for (std::uint32_t i = 1; i <= deg; ++i) {
    r = r * (nvars + i) / i;
  }
  return r;
}

namespace {

void enumerate_degree(std::size_t nvars, std::uint32_t deg,
                      std::vector<Monomial>& out) {
  // exponent vectors of total degree deg in descending lex order
  Monomial m(nvars);
  m.exponents[0] = deg;
  while (true) {
    out.push_back(m);
    // find rightmost position (excluding last) with a positive exponent
    std::size_t i = nvars - 1;
    bool found = false;
    for (std::size_t j = nvars - 1; j-- > 0;) {
      if (m.exponents[j] > 0) {
        i = j;
        found = true;
        break;
      }
    }
    if (!found) break;
    m.exponents[i] -= 1;
    std::uint32_t rest = m.exponents[nvars - 1] + 1;
    m.exponents[nvars - 1] = 0;
    m.exponents[i + 1] = rest;
    // ripple: everything after i+1 must be zero except the tail we just set
  }
}

}  // namespace

std::vector<Monomial> basis(std::size_t nvars, std::uint32_t deg) {
  if (nvars == 0) throw Error("basis: need at least one variable");
  std::vector<Monomial> out;
  out.reserve(basis_size(nvars, deg));
  for (std::uint32_t d = 0; d <= deg; ++d) {
    if (d == 0) {
      out.emplace_back(nvars);
    } else if (nvars == 1) {
      Monomial m(1);
      m.exponents[0] = d;
      out.push_back(m);
    } else {
      enumerate_degree(nvars, d, out);
    }
  }
  return out;
}

MonomialBasis::MonomialBasis(std::size_t nvars, std::uint32_t maxdeg)
    : nvars_(nvars), maxdeg_(maxdeg), list_(basis(nvars, maxdeg)) {
  index_.reserve(list_.size() * 2);
  for (std::size_t i = 0; i < list_.size(); ++i) index_.emplace(list_[i], i);
}

std::optional<std::size_t> MonomialBasis::try_index_of(const Monomial& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t MonomialBasis::index_of(const Monomial& m) const {
  auto i = try_index_of(m);
  if (!i) throw Error("monomial outside basis degree bound");
  return *i;
}

VariableSpace::Ptr VariableSpace::make(
    std::vector<std::pair<std::string, std::vector<std::string>>> blocks) {
  auto s = std::make_shared<VariableSpace>();
  for (auto& [bname, vars] : blocks) {
    VariableBlock b;
    b.name = bname;
    b.offset = s->names_.size();
    b.size = vars.size();
    for (auto& v : vars) {
      if (s->index_of(v)) throw Error("duplicate variable name: " + v);
      s->names_.push_back(v);
    }
    for (const auto& other : s->blocks_)
      if (other.name == b.name) throw Error("duplicate block name: " + b.name);
    s->blocks_.push_back(std::move(b));
  }
  if (s->names_.empty()) throw Error("variable space must not be empty");
  return s;
}

VariableSpace::Ptr VariableSpace::make_flat(const std::string& block_name,
                                            std::size_t count,
                                            const std::string& var_prefix) {
  std::vector<std::string> vars;
  vars.reserve(count);
  for (std::size_t i = 1; i <= count; ++i)
    vars.push_back(var_prefix + std::to_string(i));
  return make({{block_name, std::move(vars)}});
}

const VariableBlock* VariableSpace::find_block(std::string_view name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return &b;
  return nullptr;
}

const VariableBlock& VariableSpace::block(std::string_view name) const {
  const auto* b = find_block(name);
  if (!b) throw Error("unknown variable block: " + std::string(name));
  return *b;
}

std::optional<std::size_t> VariableSpace::index_of(std::string_view var) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == var) return i;
  return std::nullopt;
}

bool VariableSpace::same_as(const VariableSpace& other) const {
  if (this == &other) return true;
  if (names_ != other.names_) return false;
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].name != other.blocks_[i].name ||
        blocks_[i].offset != other.blocks_[i].offset ||
        blocks_[i].size != other.blocks_[i].size)
      return false;
  }
  return true;
}

Polynomial Polynomial::constant(VariableSpace::Ptr space, double c) {
  Polynomial p(std::move(space));
  p.set_coefficient(Monomial(p.space_->size()), c);
  return p;
}

Polynomial Polynomial::variable(VariableSpace::Ptr space, std::size_t index) {
  Polynomial p(std::move(space));
  if (index >= p.space_->size()) throw Error("variable index out of range");
  Monomial m(p.space_->size());
  m.exponents[index] = 1;
  p.set_coefficient(std::move(m), 1.0);
  return p;
}

Polynomial Polynomial::monomial(VariableSpace::Ptr space, Monomial m, double c) {
  Polynomial p(std::move(space));
  if (m.nvars() != p.space_->size()) throw Error("monomial dimension mismatch");
  p.set_coefficient(std::move(m), c);
  return p;
}

std::uint32_t Polynomial::degree() const {
  if (terms_.empty()) return 0;
  return terms_.rbegin()->first.degree();
}

std::uint32_t Polynomial::degree_in_block(std::string_view block) const {
  const auto& b = space_->block(block);
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) {
    std::uint32_t s = 0;
    for (std::size_t i = 0; i < b.size; ++i) s += m.exponents[b.offset + i];
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::set_coefficient(Monomial m, double c) {
  if (m.nvars() != space_->size()) throw Error("monomial dimension mismatch");
  if (c == 0.0)
    terms_.erase(m);
  else
    terms_[std::move(m)] = c;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::eval(std::span<const double> point) const {
  if (point.size() != space_->size())
    throw Error("eval: point dimension mismatch");
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      const std::uint32_t e = m.exponents[i];
      if (e == 0) continue;
      double base = point[i], pw = 1.0;
      std::uint32_t k = e;
      while (k) {
        if (k & 1u) pw *= base;
        base *= base;
        k >>= 1u;
      }
      t *= pw;
    }
    acc += t;
  }
  return acc;
}

void Polynomial::check_same_space(const Polynomial& o) const {
  if (space_.get() == o.space_.get()) return;
  if (!space_->same_as(*o.space_)) throw Error("polynomial variable-space mismatch");
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check_same_space(o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check_same_space(o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double a) {
  if (a == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= a;
  return *this;
}

Polynomial Polynomial::mul(const Polynomial& a, const Polynomial& b) {
  a.check_same_space(b);
  Polynomial r(a.space_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma + mb, ca * cb);
  return r;
}

Polynomial Polynomial::pow(std::uint32_t k) const {
  Polynomial r = constant(space_, 1.0);
  Polynomial base = *this;
  while (k) {
    if (k & 1u) r = mul(r, base);
    k >>= 1u;
    if (k) base = mul(base, base);
  }
  return r;
}

Polynomial Polynomial::substitute_block(std::string_view block,
                                        std::span<const double> values) const {
  const auto& b = space_->block(block);
  if (values.size() != b.size)
    throw Error("substitute_block: value count does not match block size");
  // target space: same blocks minus the substituted one
  std::vector<std::pair<std::string, std::vector<std::string>>> rest;
  for (const auto& blk : space_->blocks()) {
    if (blk.name == b.name) continue;
    std::vector<std::string> vars(space_->names().begin() + blk.offset,
                                  space_->names().begin() + blk.offset + blk.size);
    rest.emplace_back(blk.name, std::move(vars));
  }
  if (rest.empty()) throw Error("substitute_block: cannot remove the only block");
  auto target = VariableSpace::make(std::move(rest));
  Polynomial out(target);
  for (const auto& [m, c] : terms_) {
    double factor = c;
    for (std::size_t i = 0; i < b.size; ++i) {
      std::uint32_t e = m.exponents[b.offset + i];
      for (std::uint32_t k = 0; k < e; ++k) factor *= values[i];
    }
    if (factor == 0.0) continue;
    Monomial rm(target->size());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < space_->size(); ++i) {
      if (i >= b.offset && i < b.offset + b.size) continue;
      rm.exponents[pos++] = m.exponents[i];
    }
    out.add_term(rm, factor);
  }
  return out;
}

Polynomial Polynomial::lift(VariableSpace::Ptr target) const {
  // map every source index to its slot in the target via block names
  std::vector<std::size_t> map(space_->size());
  for (const auto& blk : space_->blocks()) {
    const auto& tb = target->block(blk.name);
    if (tb.size != blk.size)
      throw Error("lift: block '" + blk.name + "' size mismatch");
    for (std::size_t i = 0; i < blk.size; ++i)
      map[blk.offset + i] = tb.offset + i;
  }
  Polynomial out(std::move(target));
  for (const auto& [m, c] : terms_) {
    Monomial tm(out.space_->size());
    for (std::size_t i = 0; i < space_->size(); ++i)
      tm.exponents[map[i]] = m.exponents[i];
    out.add_term(tm, c);
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  // highest degree first, natural variable order within a degree
  std::vector<const TermMap::value_type*> ordered;
  ordered.reserve(terms_.size());
  for (const auto& term : terms_) ordered.push_back(&term);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) {
                     const auto da = a->first.degree(), db = b->first.degree();
                     if (da != db) return da > db;
                     return grlex_less(a->first, b->first);
                   });
  for (const auto* term : ordered) {
    const auto& [m, c] = *term;
    double v = c;
    if (first) {
      if (v < 0) {
        os << "-";
        v = -v;
      }
    } else {
      os << (v < 0 ? " - " : " + ");
      v = std::abs(v);
    }
    first = false;
    bool printed_coeff = false;
    if (v != 1.0 || m.degree() == 0) {
      os << v;
      printed_coeff = true;
    }
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m.exponents[i] == 0) continue;
      if (printed_coeff) os << "*";
      printed_coeff = true;
      os << space_->names()[i];
      if (m.exponents[i] > 1) os << "^" << m.exponents[i];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// textual syntax
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("polynomial syntax error at column " + std::to_string(pos + 1) +
                ": " + msg);
  }
};

double parse_number(Cursor& c) {
  c.skip_ws();
  const char* begin = c.s.data() + c.pos;
  const char* end = c.s.data() + c.s.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin) c.fail("expected a number");
  c.pos += static_cast<std::size_t>(ptr - begin);
  return value;
}

std::string parse_ident(Cursor& c) {
  c.skip_ws();
  std::size_t start = c.pos;
  while (c.pos < c.s.size() &&
         (std::isalnum(static_cast<unsigned char>(c.s[c.pos])) || c.s[c.pos] == '_'))
    ++c.pos;
  if (c.pos == start) c.fail("expected a variable name");
  return std::string(c.s.substr(start, c.pos - start));
}

}  // namespace

Polynomial parse_polynomial(VariableSpace::Ptr space, std::string_view text) {
  Polynomial out(space);
  Cursor c{text};
  if (c.eof()) c.fail("empty polynomial");
  bool first_term = true;
  while (!c.eof()) {
    double sign = 1.0;
    char ch = c.peek();
    if (ch == '+' || ch == '-') {
      sign = (ch == '-') ? -1.0 : 1.0;
      ++c.pos;
    } else if (!first_term) {
      c.fail("expected '+' or '-' between terms");
    }
    first_term = false;
    // one term: optional coefficient, then '*'-separated powers
    double coeff = sign;
    Monomial m(space->size());
    bool any_factor = false;
    c.skip_ws();
    ch = c.peek();
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      coeff *= parse_number(c);
      any_factor = true;
      if (c.peek() == '*') {
        ++c.pos;
        any_factor = false;  // a variable factor must follow
      } else {
        // pure constant term
        out.add_term(m, coeff);
        continue;
      }
    }
    while (true) {
      const std::string name = parse_ident(c);
      auto idx = space->index_of(name);
      if (!idx) c.fail("undeclared variable '" + name + "'");
      std::uint32_t e = 1;
      if (c.peek() == '^') {
        ++c.pos;
        c.skip_ws();
        if (c.peek() == '-') c.fail("negative exponents are not allowed");
        const char* begin = c.s.data() + c.pos;
        const char* end = c.s.data() + c.s.size();
        auto [ptr, ec] = std::from_chars(begin, end, e);
        if (ec != std::errc() || ptr == begin) c.fail("expected a positive integer exponent");
        c.pos += static_cast<std::size_t>(ptr - begin);
      }
      m.exponents[*idx] += e;
      any_factor = true;
      if (c.peek() == '*') {
        ++c.pos;
        continue;
      }
      break;
    }
    if (!any_factor) c.fail("dangling '*'");
    out.add_term(m, coeff);
  }
  return out;
}

}  // namespace rvopt
