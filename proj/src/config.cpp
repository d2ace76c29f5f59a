#include "certsurf/config.hpp"

#include <fstream>
#include <sstream>

#include "certsurf/parser.hpp"

namespace certsurf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& w : split_words(text)) {
    Interval v;
    try {
      v = parse_number(w);
    } catch (const Error&) {
      throw ConfigError("not a number: '" + w + "'");
    }
    out.push_back(v.mid());
  }
  return out;
}

IntervalBox parse_box(const std::string& text) {
  std::vector<double> v = parse_reals(text);
  if (v.empty() || v.size() % 2) throw ConfigError("a box needs lo hi pairs: '" + text + "'");
  IntervalBox box(v.size() / 2);
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!(v[2 * i] <= v[2 * i + 1])) throw ConfigError("box side with lo > hi: '" + text + "'");
    box[i] = Interval(v[2 * i], v[2 * i + 1]);
  }
  return box;
}

double parse_rho(const std::string& text) {
  Interval v;
  try {
    v = parse_number(trim(text));
  } catch (const Error&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (!(v.lo() > 0 && v.hi() < 1)) throw ConfigError("rho must lie in (0, 1)");
  return v.lo();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key == "variables") {
      cfg.variables = split_words(val);
    } else if (key == "equation") {
      cfg.equations.push_back(val);
    } else if (key == "start") {
      auto v = parse_reals(val);
      cfg.start = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (key == "r") {
      auto v = parse_reals(val);
      if (v.size() != 1 || !(v[0] > 0)) throw ConfigError("r must be one positive number");
      cfg.r_initial = v[0];
    } else if (key == "rho") {
      cfg.rho = parse_rho(val);
    } else if (key == "domain") {
      cfg.domain = parse_box(val);
    } else if (key == "max_boxes") {
      auto v = parse_reals(val);
      if (v.size() != 1 || !(v[0] >= 1)) throw ConfigError("max_boxes must be a positive integer");
      cfg.max_boxes = static_cast<std::size_t>(v[0]);
    } else if (key == "out_json") {
      cfg.out_json = val;
    } else if (key == "out_obj") {
      cfg.out_obj = val;
    } else if (key == "mode") {
      if (val == "surface") cfg.mode = RunMode::surface;
      else if (val == "graph") cfg.mode = RunMode::graph;
      else throw ConfigError("mode must be surface or graph");
    } else if (key == "base") {
      cfg.base_box = parse_box(val);
    } else if (key == "fiber") {
      cfg.fiber_box = parse_box(val);
    } else if (key == "sheets") {
      auto v = parse_reals(val);
      if (v.size() != 1 || !(v[0] >= 1)) throw ConfigError("sheets must be a positive integer");
      cfg.sheets = static_cast<int>(v[0]);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

AnalyticSystem RunConfig::build_system() const {
  if (equations.empty()) throw ConfigError("no equations given");
  std::string src;
  for (const auto& e : equations) src += e + "\n";
  ParsedSystem ps = variables.empty() ? parse_system(src) : parse_system(src, variables);
  const std::size_t n = ps.variables.size(), m = ps.equations.size();
  if (m >= n) throw ConfigError("need fewer equations than variables");
  return AnalyticSystem(ps.equations, n, n - m, ps.variables);
}

void RunConfig::validate() const {
  AnalyticSystem s = build_system();
  if (!(rho > 0 && rho < 1)) throw ConfigError("rho must lie in (0, 1)");
  if (mode == RunMode::surface) {
    if (s.d() != 2) throw ConfigError("surface mode needs n - 2 equations");
    if (static_cast<std::size_t>(start.size()) != s.n())
      throw ConfigError("start needs " + std::to_string(s.n()) + " coordinates");
    if (domain && domain->size() != s.n()) throw ConfigError("domain has the wrong dimension");
  } else {
    if (!base_box || base_box->size() != s.d()) throw ConfigError("graph mode needs a base box of dimension d");
    if (fiber_box && fiber_box->size() != s.m()) throw ConfigError("fiber box has the wrong dimension");
    if (sheets > 1 && !fiber_box) throw ConfigError("several sheets need a fiber search box");
  }
}

}  // namespace certsurf
