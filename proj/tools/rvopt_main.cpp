#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "rvopt/problem_io.hpp"

namespace {

std::vector<std::uint32_t> parse_uint_list(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(static_cast<std::uint32_t>(std::stoul(s.substr(pos, next - pos))));
    pos = next + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rvopt: certified Pareto points for robust vector polynomial optimization\n"
      "via one-sided polynomial value-function approximation and a weighted\n"
      "p-norm scalarization sweep solved with moment relaxations"};

  rvopt::io::RunConfig cfg;
  std::string degrees, cdegrees, plist, epslist;
  long approx_order = -1;

  app.add_option("--problem", cfg.problem_path, "problem file (.prob)")
      ->required()
      ->envname("RVOPT_PROBLEM");
  app.add_option("--out", cfg.out_dir, "output directory (records.csv/.json, front.dat)")
      ->envname("RVOPT_OUT");
  app.add_option("--degrees", degrees,
                 "objective approximation degrees, comma separated (default: x-degree)")
      ->envname("RVOPT_DEGREES");
  app.add_option("--constraint-degrees", cdegrees,
                 "constraint approximation degrees, comma separated")
      ->envname("RVOPT_CONSTRAINT_DEGREES");
  app.add_option("--orders", approx_order,
                 "value-approximation relaxation order (default: degree bound + 1)")
      ->envname("RVOPT_ORDERS");
  app.add_option("--lambda-grid", cfg.lambda_grid, "weight grid a:b:step (two objectives)")
      ->envname("RVOPT_LAMBDA_GRID");
  app.add_option("--p-list", plist, "scalarization orders, e.g. 1,2,4 (append 'inf' for sup-norm)")
      ->envname("RVOPT_P_LIST");
  app.add_option("--eps", epslist, "utopia margins, comma separated (default: 0.05*(1+|bound|))")
      ->envname("RVOPT_EPS");
  app.add_option("--seed", cfg.seed, "seed for every randomized step")->envname("RVOPT_SEED");
  app.add_option("--tol", cfg.tol, "interior-point solver tolerance")->envname("RVOPT_TOL");
  app.add_option("--threads", cfg.threads, "sweep worker threads (0 = hardware)")
      ->envname("RVOPT_THREADS");
  app.add_option("--export-sdpa", cfg.export_sdpa_dir,
                 "dump every assembled SDP in SDPA sparse format to this directory")
      ->envname("RVOPT_EXPORT_SDPA");
  app.add_option("--hierarchy-extra", cfg.hierarchy_extra,
                 "extra relaxation orders tried above the degree bound")
      ->envname("RVOPT_HIERARCHY_EXTRA");
  app.add_flag("--quiet", cfg.quiet, "suppress the run summary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!degrees.empty()) cfg.objective_degrees = parse_uint_list(degrees);
    if (!cdegrees.empty()) cfg.constraint_degrees = parse_uint_list(cdegrees);
    if (approx_order >= 0) cfg.approx_order = static_cast<std::uint32_t>(approx_order);
    if (!plist.empty()) {
      cfg.p_list.clear();
      cfg.include_chebyshev = false;
      std::size_t pos = 0;
      while (pos < plist.size()) {
        std::size_t next = plist.find(',', pos);
        if (next == std::string::npos) next = plist.size();
        const std::string tok = plist.substr(pos, next - pos);
        if (tok == "inf")
          cfg.include_chebyshev = true;
        else
          cfg.p_list.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
        pos = next + 1;
      }
    }
    if (!epslist.empty()) {
      cfg.eps.clear();
      std::size_t pos = 0;
      while (pos < epslist.size()) {
        std::size_t next = epslist.find(',', pos);
        if (next == std::string::npos) next = epslist.size();
        cfg.eps.push_back(std::stod(epslist.substr(pos, next - pos)));
        pos = next + 1;
      }
    }
    return rvopt::io::run(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
