#include <algorithm>
#include <cmath>

#include "rvopt/poly.hpp"
#include "rvopt/sdp.hpp"

namespace rvopt {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SdpStatus::DualInfeasible: return "DualInfeasible";
    case SdpStatus::MaxIterations: return "MaxIterations";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

void SdpProblem::validate() const {
  if (num_vars <= 0) throw Error("sdp: num_vars must be positive");
  if (static_cast<int>(objective.size()) != num_vars)
    throw Error("sdp: objective length != num_vars");
  if (blocks.empty()) throw Error("sdp: at least one block required");
  for (const auto& b : blocks) {
    if (b.size <= 0) throw Error("sdp: block size must be positive");
    for (const auto& e : b.entries) {
      if (e.var < SdpEntry::kConstTerm || e.var >= num_vars)
        throw Error("sdp: entry variable index out of range");
      if (e.i < 0 || e.j < 0 || e.i >= b.size || e.j >= b.size)
        throw Error("sdp: entry position out of range");
      if (!std::isfinite(e.value)) throw Error("sdp: non-finite entry");
    }
  }
  for (const auto& eq : equalities) {
    for (const auto& [k, v] : eq.coeffs) {
      if (k < 0 || k >= num_vars)
        throw Error("sdp: equality variable index out of range");
      if (!std::isfinite(v)) throw Error("sdp: non-finite equality coefficient");
    }
    if (!std::isfinite(eq.rhs)) throw Error("sdp: non-finite equality rhs");
  }
}

bool structurally_equal(const SdpProblem& a, const SdpProblem& b, double atol) {
  if (a.num_vars != b.num_vars) return false;
  if (a.blocks.size() != b.blocks.size()) return false;
  if (a.equalities.size() != b.equalities.size()) return false;
  auto close = [atol](double x, double y) { return std::abs(x - y) <= atol; };
  for (int k = 0; k < a.num_vars; ++k)
    if (!close(a.objective[k], b.objective[k])) return false;

  auto canon = [](const SdpBlock& blk) {
    std::vector<SdpEntry> es = blk.entries;
    for (auto& e : es)
      if (e.i > e.j) std::swap(e.i, e.j);
    std::sort(es.begin(), es.end(), [](const SdpEntry& x, const SdpEntry& y) {
      return std::tie(x.var, x.i, x.j) < std::tie(y.var, y.i, y.j);
    });
    // merge duplicates, drop exact zeros
    std::vector<SdpEntry> merged;
    for (const auto& e : es) {
      if (!merged.empty() && merged.back().var == e.var &&
          merged.back().i == e.i && merged.back().j == e.j)
        merged.back().value += e.value;
      else
        merged.push_back(e);
    }
    std::erase_if(merged, [](const SdpEntry& e) { return e.value == 0.0; });
    return merged;
  };
  for (std::size_t bi = 0; bi < a.blocks.size(); ++bi) {
    if (a.blocks[bi].size != b.blocks[bi].size) return false;
    const auto ea = canon(a.blocks[bi]);
    const auto eb = canon(b.blocks[bi]);
    if (ea.size() != eb.size()) return false;
    for (std::size_t k = 0; k < ea.size(); ++k) {
      if (ea[k].var != eb[k].var || ea[k].i != eb[k].i || ea[k].j != eb[k].j ||
          !close(ea[k].value, eb[k].value))
        return false;
    }
  }
  for (std::size_t e = 0; e < a.equalities.size(); ++e) {
    auto ca = a.equalities[e].coeffs;
    auto cb = b.equalities[e].coeffs;
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    if (ca.size() != cb.size()) return false;
    for (std::size_t k = 0; k < ca.size(); ++k)
      if (ca[k].first != cb[k].first || !close(ca[k].second, cb[k].second))
        return false;
    if (!close(a.equalities[e].rhs, b.equalities[e].rhs)) return false;
  }
  return true;
}

}  // namespace rvopt
