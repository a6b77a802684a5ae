// SDPA sparse (.dat-s) export/import. The file describes the SDPA primal
//   min c^T x   s.t.   X = sum_i x_i F_i - F_0,  X PSD,
// which matches our form with F_i = A_i and F_0 = -A_0. Equalities a.y = b
// become paired diagonal entries (a.y - b, b - a.y) in one trailing diagonal
// block; a comment line records the encoding so import can undo it.
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "rvopt/poly.hpp"
#include "rvopt/sdp.hpp"

namespace rvopt {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string export_sdpa(const SdpProblem& p) {
  p.validate();
  const std::size_t neq = p.equalities.size();
  std::ostringstream os;
  os << "*rvopt sdpa sparse export\n";
  if (neq > 0)
    os << "*rvopt-eq block=" << (p.blocks.size() + 1) << " count=" << neq
       << " (each equality a.y=b is the diagonal pair a.y-b >= 0, b-a.y >= 0)\n";
  os << p.num_vars << " = mDIM\n";
  const std::size_t nblock = p.blocks.size() + (neq > 0 ? 1 : 0);
  os << nblock << " = nBLOCK\n";
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    os << p.blocks[b].size << (b + 1 < nblock ? " " : "");
  if (neq > 0) os << -2 * static_cast<long>(neq);
  os << "\n";
  for (int k = 0; k < p.num_vars; ++k)
    os << fmt17(p.objective[k]) << (k + 1 < p.num_vars ? " " : "");
  os << "\n";

  // matno blkno i j value, 1-based, i <= j, duplicates merged
  std::map<std::tuple<int, int, int, int>, double> acc;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    for (const auto& e : p.blocks[b].entries) {
      int i = e.i, j = e.j;
      if (i > j) std::swap(i, j);
      const int matno = (e.var == SdpEntry::kConstTerm) ? 0 : e.var + 1;
      const double v = (matno == 0) ? -e.value : e.value;  // F_0 = -A_0
      acc[{matno, static_cast<int>(b) + 1, i + 1, j + 1}] += v;
    }
  }
  const int eqblk = static_cast<int>(p.blocks.size()) + 1;
  for (std::size_t r = 0; r < neq; ++r) {
    const int pos1 = static_cast<int>(2 * r) + 1, pos2 = pos1 + 1;
    for (const auto& [k, v] : p.equalities[r].coeffs) {
      acc[{k + 1, eqblk, pos1, pos1}] += v;
      acc[{k + 1, eqblk, pos2, pos2}] -= v;
    }
    acc[{0, eqblk, pos1, pos1}] += p.equalities[r].rhs;
    acc[{0, eqblk, pos2, pos2}] -= p.equalities[r].rhs;
  }
  for (const auto& [key, v] : acc) {
    if (v == 0.0) continue;
    const auto& [matno, blk, i, j] = key;
    os << matno << " " << blk << " " << i << " " << j << " " << fmt17(v) << "\n";
  }
  return os.str();
}

namespace {

struct Tokenizer {
  const std::string& s;
  std::size_t pos = 0;

  bool next(std::string& tok) {
    while (pos < s.size()) {
      const char c = s[pos];
      if (c == '*' || c == '"') {  // comment or SDPA-style quote line
        while (pos < s.size() && s[pos] != '\n') ++pos;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '(' ||
          c == ')' || c == '{' || c == '}') {
        ++pos;
        continue;
      }
      break;
    }
    if (pos >= s.size()) return false;
    std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
           s[pos] != ',' && s[pos] != '(' && s[pos] != ')' && s[pos] != '{' &&
           s[pos] != '}')
      ++pos;
    tok = s.substr(start, pos - start);
    // strip "= mDIM" style annotations: tokens like "=" or names are invalid
    return true;
  }

  long next_int() {
    std::string t;
    while (next(t)) {
      try {
        std::size_t used = 0;
        long v = std::stol(t, &used);
        if (used == t.size()) return v;
      } catch (...) {
      }
      // skip annotation tokens such as "=" and "mDIM"
    }
    throw Error("sdpa import: unexpected end of file (integer expected)");
  }

  bool next_double(double& out) {
    std::string t;
    while (next(t)) {
      try {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used == t.size()) {
          out = v;
          return true;
        }
      } catch (...) {
      }
    }
    return false;
  }
};

}  // namespace

SdpProblem import_sdpa(const std::string& text) {
  // scan comments for the equality marker before tokenizing
  long eq_block = -1, eq_count = 0;
  {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      if (line.rfind("*rvopt-eq", 0) == 0) {
        if (std::sscanf(line.c_str(), "*rvopt-eq block=%ld count=%ld", &eq_block,
                        &eq_count) != 2)
          throw Error("sdpa import: malformed *rvopt-eq marker");
      }
    }
  }

  Tokenizer tz{text};
  const long m = tz.next_int();
  const long nblock = tz.next_int();
  if (m <= 0 || nblock <= 0) throw Error("sdpa import: bad dimensions");
  std::vector<long> sizes(nblock);
  for (long b = 0; b < nblock; ++b) sizes[b] = tz.next_int();

  SdpProblem p;
  p.num_vars = static_cast<int>(m);
  p.objective.resize(m);
  for (long k = 0; k < m; ++k) {
    if (!tz.next_double(p.objective[k]))
      throw Error("sdpa import: missing objective entry");
  }
  const bool has_eq = eq_block > 0;
  if (has_eq) {
    if (eq_block != nblock || sizes[eq_block - 1] != -2 * eq_count)
      throw Error("sdpa import: equality marker inconsistent with block table");
    p.equalities.resize(eq_count);
  }
  const long nplain = has_eq ? nblock - 1 : nblock;
  for (long b = 0; b < nplain; ++b) {
    SdpBlock blk;
    blk.size = static_cast<int>(std::abs(sizes[b]));
    p.blocks.push_back(std::move(blk));
  }

  while (true) {
    std::string t;
    Tokenizer probe = tz;
    if (!probe.next(t)) break;
    const long matno = tz.next_int();
    const long blkno = tz.next_int();
    const long i = tz.next_int();
    const long j = tz.next_int();
    double v = 0.0;
    if (!tz.next_double(v)) throw Error("sdpa import: truncated entry line");
    if (blkno < 1 || blkno > nblock) throw Error("sdpa import: block out of range");
    if (matno < 0 || matno > m) throw Error("sdpa import: matrix id out of range");
    if (has_eq && blkno == eq_block) {
      if (i != j) throw Error("sdpa import: equality block must be diagonal");
      const long r = (i - 1) / 2;
      const bool first = ((i - 1) % 2) == 0;
      if (r >= eq_count) throw Error("sdpa import: equality index out of range");
      if (matno == 0) {
        if (first) p.equalities[r].rhs = v;  // F_0 diag holds +b, -b
      } else if (first) {
        p.equalities[r].coeffs.emplace_back(static_cast<int>(matno) - 1, v);
      }
      continue;
    }
    SdpEntry e;
    e.var = (matno == 0) ? SdpEntry::kConstTerm : static_cast<int>(matno) - 1;
    e.i = static_cast<int>(i) - 1;
    e.j = static_cast<int>(j) - 1;
    e.value = (matno == 0) ? -v : v;  // A_0 = -F_0
    p.blocks[blkno - 1].entries.push_back(e);
  }
  p.validate();
  return p;
}

}  // namespace rvopt
