#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>

#include "rvopt/problem_io.hpp"
#include "rvopt/sdp.hpp"

namespace rvopt::io {

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out.push_back((std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                   c == '-' || c == '.')
                      ? c
                      : '_');
  return out;
}

}  // namespace

int run(const RunConfig& config) {
  const pipeline::ProblemSpec spec = parse_problem(config.problem_path);
  const std::size_t l = spec.num_objectives();

  if (!config.quiet) {
    std::printf("problem: %zu objective(s), %zu constraint(s), %zu decision variable(s)\n",
                l, spec.num_constraints(), spec.nx());
    std::printf(
        "user obligations (not verified by this tool):\n"
        "  - the robust feasible set is nonempty and compact\n"
        "  - the robust feasible set equals the closure of its interior\n"
        "  - no robust constraint is identically zero on an open subset of X\n");
  }

  pipeline::SweepOptions sw;
  sw.objective_degrees = config.objective_degrees;
  sw.constraint_degrees = config.constraint_degrees;
  sw.approx_order = config.approx_order;
  sw.hierarchy_extra_orders = config.hierarchy_extra;
  sw.lambda_grid = parse_lambda_grid(config.lambda_grid, l);
  sw.p_list = config.p_list;
  sw.include_chebyshev = config.include_chebyshev;
  sw.eps = config.eps;
  sw.seed = config.seed;
  sw.sdp_tol = config.tol;
  sw.threads = config.threads;

  // export hook: deterministic names keyed by the semantic label
  auto export_state = std::make_shared<std::pair<std::mutex, std::map<std::string, int>>>();
  if (!config.export_sdpa_dir.empty()) {
    std::filesystem::create_directories(config.export_sdpa_dir);
    const auto dir = config.export_sdpa_dir;
    sw.export_hook = [dir, export_state](const SdpProblem& p, const std::string& label) {
      std::string name = sanitize(label);
      {
        std::lock_guard<std::mutex> lock(export_state->first);
        const int k = export_state->second[name]++;
        if (k > 0) name += "_" + std::to_string(k);
      }
      std::ofstream out(dir / (name + ".dat-s"));
      if (out) out << export_sdpa(p);
    };
  }

  const pipeline::SweepResult result = pipeline::sweep(spec, sw);
  emit_records(result.records, l, spec.nx(), config.out_dir, sw.dominance_tol);

  if (!config.quiet) {
    std::printf("utopia point:");
    for (double v : result.utopia.y_u) std::printf(" %.6g", v);
    std::printf("\nrecords: %zu total, %zu certified\n", result.records.size(),
                result.certified_count());
    for (const auto& d : result.diagnostics) {
      if (d.ok && d.message.empty()) continue;
      std::printf("  cell p=%s lambda=(", d.chebyshev ? "inf" : std::to_string(d.p).c_str());
      for (std::size_t i = 0; i < d.lambda.size(); ++i)
        std::printf("%s%.4g", i ? "," : "", d.lambda[i]);
      std::printf("): %s%s\n", d.ok ? "warning: " : "failed: ", d.message.c_str());
    }
    std::printf("output written to %s\n", config.out_dir.string().c_str());
  }
  return result.certified_count() > 0 ? 0 : 2;
}

}  // namespace rvopt::io
