#include "rvopt/problem_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rvopt::io {

namespace {

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<double> parse_doubles(const std::string& s, std::size_t line) {
  std::vector<double> out;
  for (const auto& tok : split_ws(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (...) {
      throw ParseError(line, "expected a number, got '" + tok + "'");
    }
  }
  return out;
}

struct RawSet {
  std::string type;  // box | ball | general
  std::vector<double> lower, upper, center;
  std::optional<double> radius, bound;
  std::vector<std::pair<std::string, std::size_t>> ineq_texts;  // text, line
  std::size_t line = 0;
  bool present = false;
};

SetDescriptor build_set(const RawSet& raw, const VariableSpace::Ptr& space,
                        const std::string& label) {
  const std::size_t n = space->size();
  if (raw.type == "box") {
    if (raw.lower.size() != n || raw.upper.size() != n)
      throw ParseError(raw.line, "set " + label + ": lower/upper need " +
                                     std::to_string(n) + " entries");
    return make_box(space, raw.lower, raw.upper);
  }
  if (raw.type == "ball") {
    if (!raw.radius) throw ParseError(raw.line, "set " + label + ": radius missing");
    std::vector<double> center = raw.center;
    if (center.empty()) center.assign(n, 0.0);
    if (center.size() != n)
      throw ParseError(raw.line, "set " + label + ": center needs " +
                                     std::to_string(n) + " entries");
    return make_ball(space, center, *raw.radius);
  }
  if (raw.type == "general") {
    if (!raw.bound)
      throw ParseError(raw.line, "set " + label +
                                     ": general sets need 'bound' (compactness witness)");
    std::vector<Polynomial> ineqs;
    for (const auto& [text, line] : raw.ineq_texts) {
      try {
        ineqs.push_back(parse_polynomial(space, text));
      } catch (const Error& e) {
        throw ParseError(line, e.what());
      }
    }
    return make_general(space, std::move(ineqs), *raw.bound);
  }
  throw ParseError(raw.line, "set " + label + ": unknown type '" + raw.type +
                                 "' (box, ball or general)");
}

}  // namespace

pipeline::ProblemSpec parse_problem_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;

  std::string section;
  std::vector<std::string> xvars, uvars, vvars;
  std::vector<std::pair<std::string, std::size_t>> objective_texts, constraint_texts;
  RawSet setx, setu, setv;
  bool saw_variables = false;

  auto current_set = [&]() -> RawSet* {
    if (section == "set X") return &setx;
    if (section == "set U") return &setu;
    if (section == "set V") return &setv;
    return nullptr;
  };

  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "variables" && section != "objectives" &&
          section != "constraints" && section != "set X" && section != "set U" &&
          section != "set V")
        throw ParseError(lineno, "unknown section [" + section + "]");
      if (section == "variables") saw_variables = true;
      if (auto* rs = current_set()) {
        rs->present = true;
        rs->line = lineno;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ParseError(lineno, "content before any section");

    if (section == "variables") {
      if (key == "x")
        xvars = split_ws(value);
      else if (key == "u")
        uvars = split_ws(value);
      else if (key == "v")
        vvars = split_ws(value);
      else
        throw ParseError(lineno, "unknown variable block '" + key + "' (x, u or v)");
    } else if (section == "objectives") {
      const std::string want = "f" + std::to_string(objective_texts.size() + 1);
      if (key != want)
        throw ParseError(lineno, "objectives must be named f1, f2, ... in order (got '" +
                                     key + "', expected '" + want + "')");
      objective_texts.emplace_back(value, lineno);
    } else if (section == "constraints") {
      const std::string want = "g" + std::to_string(constraint_texts.size() + 1);
      if (key != want)
        throw ParseError(lineno, "constraints must be named g1, g2, ... in order (got '" +
                                     key + "', expected '" + want + "')");
      constraint_texts.emplace_back(value, lineno);
    } else {
      RawSet* rs = current_set();
      if (key == "type")
        rs->type = value;
      else if (key == "lower")
        rs->lower = parse_doubles(value, lineno);
      else if (key == "upper")
        rs->upper = parse_doubles(value, lineno);
      else if (key == "center")
        rs->center = parse_doubles(value, lineno);
      else if (key == "radius")
        rs->radius = parse_doubles(value, lineno).at(0);
      else if (key == "bound")
        rs->bound = parse_doubles(value, lineno).at(0);
      else if (key == "ineq")
        rs->ineq_texts.emplace_back(value, lineno);
      else
        throw ParseError(lineno, "unknown set key '" + key + "'");
    }
  }

  if (!saw_variables) throw ParseError(lineno, "missing [variables] section");
  if (xvars.empty()) throw ParseError(lineno, "no x variables declared");
  if (objective_texts.empty()) throw ParseError(lineno, "no objectives declared");
  if (!setx.present) throw ParseError(lineno, "missing [set X] section");
  if (!uvars.empty() && !setu.present)
    throw ParseError(lineno, "u variables declared but [set U] missing");
  if (uvars.empty() && setu.present)
    throw ParseError(setu.line, "[set U] given but no u variables declared");
  if (!vvars.empty() && !setv.present)
    throw ParseError(lineno, "v variables declared but [set V] missing");
  if (vvars.empty() && setv.present)
    throw ParseError(setv.line, "[set V] given but no v variables declared");
  if (!constraint_texts.empty() && vvars.empty() && setv.present)
    throw ParseError(lineno, "constraints need either v variables with [set V] or none");

  pipeline::ProblemSpec spec;
  spec.x_space = VariableSpace::make({{"x", xvars}});
  VariableSpace::Ptr obj_space =
      uvars.empty() ? spec.x_space : VariableSpace::make({{"x", xvars}, {"u", uvars}});
  VariableSpace::Ptr con_space =
      vvars.empty() ? spec.x_space : VariableSpace::make({{"x", xvars}, {"v", vvars}});

  for (const auto& [text, ln] : objective_texts) {
    try {
      spec.objectives.push_back(parse_polynomial(obj_space, text));
    } catch (const Error& e) {
      throw ParseError(ln, e.what());
    }
  }
  for (const auto& [text, ln] : constraint_texts) {
    try {
      spec.constraints.push_back(parse_polynomial(con_space, text));
    } catch (const Error& e) {
      throw ParseError(ln, e.what());
    }
  }

  spec.x_set = build_set(setx, spec.x_space, "X");
  if (!spec.x_set.is_box() && !spec.x_set.is_ball())
    throw ParseError(setx.line, "set X must be a box or a ball");
  if (!uvars.empty())
    spec.u_set = build_set(setu, VariableSpace::make({{"u", uvars}}), "U");
  if (!vvars.empty())
    spec.v_set = build_set(setv, VariableSpace::make({{"v", vvars}}), "V");
  spec.validate();
  return spec;
}

pipeline::ProblemSpec parse_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str());
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_set(std::ostringstream& os, const SetDescriptor& s, const std::string& label) {
  os << "[set " << label << "]\n";
  if (const auto* box = std::get_if<BoxShape>(&s.shape)) {
    os << "type = box\nlower =";
    for (double v : box->lower) os << " " << fmt(v);
    os << "\nupper =";
    for (double v : box->upper) os << " " << fmt(v);
    os << "\n";
  } else if (const auto* ball = std::get_if<BallShape>(&s.shape)) {
    os << "type = ball\ncenter =";
    for (double v : ball->center) os << " " << fmt(v);
    os << "\nradius = " << fmt(ball->radius) << "\n";
  } else {
    os << "type = general\nbound = " << fmt(std::get<GeneralShape>(s.shape).bound)
       << "\n";
    for (std::size_t i = 0; i < s.inequalities.size(); ++i) {
      if (s.witness_index && *s.witness_index == i) continue;  // re-added on load
      os << "ineq = " << s.inequalities[i].to_string() << "\n";
    }
  }
  os << "\n";
}

}  // namespace

std::string serialize_problem(const pipeline::ProblemSpec& spec) {
  std::ostringstream os;
  os << "[variables]\nx =";
  for (const auto& v : spec.x_space->names()) os << " " << v;
  os << "\n";
  if (spec.u_set) {
    os << "u =";
    for (const auto& v : spec.u_set->space->names()) os << " " << v;
    os << "\n";
  }
  if (spec.v_set) {
    os << "v =";
    for (const auto& v : spec.v_set->space->names()) os << " " << v;
    os << "\n";
  }
  os << "\n[objectives]\n";
  for (std::size_t i = 0; i < spec.objectives.size(); ++i)
    os << "f" << (i + 1) << " = " << spec.objectives[i].to_string() << "\n";
  if (!spec.constraints.empty()) {
    os << "\n[constraints]\n";
    for (std::size_t j = 0; j < spec.constraints.size(); ++j)
      os << "g" << (j + 1) << " = " << spec.constraints[j].to_string() << "\n";
  }
  os << "\n";
  write_set(os, spec.x_set, "X");
  if (spec.u_set) write_set(os, *spec.u_set, "U");
  if (spec.v_set) write_set(os, *spec.v_set, "V");
  return os.str();
}

std::vector<std::vector<double>> parse_lambda_grid(const std::string& text,
                                                   std::size_t l) {
  if (text.empty()) return pipeline::default_lambda_grid(l);
  if (l != 2)
    throw Error("lambda-grid a:b:step is defined for two objectives; use the default grid");
  double a = 0, b = 0, step = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3)
    throw Error("lambda-grid must look like 0.05:0.95:0.05");
  if (!(step > 0.0) || !(a > 0.0) || !(b < 1.0) || a > b)
    throw Error("lambda-grid must satisfy 0 < a <= b < 1, step > 0");
  std::vector<std::vector<double>> grid;
  for (double x = a; x <= b + 1e-12; x += step) grid.push_back({x, 1.0 - x});
  return grid;
}

}  // namespace rvopt::io
