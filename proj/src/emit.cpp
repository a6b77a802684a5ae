#include <fstream>

#include "json.hpp"
#include "rvopt/problem_io.hpp"

namespace rvopt::io {

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string p_label(const pipeline::ParetoRecord& r) {
  return r.chebyshev ? "inf" : std::to_string(r.p);
}

}  // namespace

void emit_records(const std::vector<pipeline::ParetoRecord>& records,
                  std::size_t l, std::size_t nx,
                  const std::filesystem::path& out_dir, double dominance_tol) {
  std::filesystem::create_directories(out_dir);

  // CSV
  {
    std::ofstream csv(out_dir / "records.csv");
    if (!csv) throw Error("cannot write " + (out_dir / "records.csv").string());
    for (std::size_t i = 1; i <= l; ++i) csv << "lambda_" << i << ",";
    csv << "p,";
    for (std::size_t i = 1; i <= nx; ++i) csv << "x_" << i << ",";
    for (std::size_t i = 1; i <= l; ++i) csv << "Fapprox_" << i << ",";
    for (std::size_t i = 1; i <= l; ++i) csv << "Frobust_" << i << ",";
    csv << "certified\n";
    for (const auto& r : records) {
      for (double v : r.lambda) csv << fmt12(v) << ",";
      csv << p_label(r) << ",";
      for (double v : r.x_star) csv << fmt12(v) << ",";
      for (double v : r.approx_values) csv << fmt12(v) << ",";
      for (double v : r.robust_values) csv << fmt12(v) << ",";
      csv << (r.certified ? "true" : "false") << "\n";
    }
  }

  // JSON mirror
  {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : records) {
      nlohmann::json o;
      o["lambda"] = r.lambda;
      o["p"] = p_label(r);
      o["x"] = r.x_star;
      o["F_approx"] = r.approx_values;
      o["F_robust"] = r.robust_values;
      o["certified"] = r.certified;
      j.push_back(std::move(o));
    }
    std::ofstream js(out_dir / "records.json");
    if (!js) throw Error("cannot write " + (out_dir / "records.json").string());
    js << j.dump(2) << "\n";
  }

  // plot data: certified nondominated robust value pairs
  if (l == 2) {
    std::vector<pipeline::ParetoRecord> certified;
    for (const auto& r : records)
      if (r.certified) certified.push_back(r);
    const auto front = pipeline::pareto_filter(std::move(certified), dominance_tol);
    std::ofstream pd(out_dir / "front.dat");
    if (!pd) throw Error("cannot write " + (out_dir / "front.dat").string());
    pd << "# Frobust_1 Frobust_2\n";
    for (const auto& r : front)
      pd << fmt12(r.robust_values[0]) << " " << fmt12(r.robust_values[1]) << "\n";
  }
}

}  // namespace rvopt::io
