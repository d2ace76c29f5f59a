// certsurf command line: approximate, verify, graph.
#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "certsurf/config.hpp"
#include "certsurf/export.hpp"
#include "certsurf/graph_approx.hpp"
#include "certsurf/parser.hpp"
#include "certsurf/surface.hpp"
#include "certsurf/verify.hpp"

using namespace certsurf;

namespace {

constexpr int kOk = 0;
constexpr int kCertFailure = 2;
constexpr int kInputError = 3;

struct Overrides {
  std::vector<std::string> equations;
  std::string variables;
  std::string rho, start, domain, base, fiber;
  std::optional<double> r;
  std::optional<std::size_t> max_boxes;
  std::optional<int> sheets;
  std::string out_json, out_obj;
};

void apply(RunConfig& cfg, const Overrides& o) {
  if (!o.equations.empty()) cfg.equations = o.equations;
  if (!o.variables.empty()) cfg.variables = parse_config("variables = " + o.variables).variables;
  if (!o.rho.empty()) cfg.rho = parse_rho(o.rho);
  if (!o.start.empty()) {
    auto v = parse_reals(o.start);
    cfg.start = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (!o.domain.empty()) cfg.domain = parse_box(o.domain);
  if (!o.base.empty()) cfg.base_box = parse_box(o.base);
  if (!o.fiber.empty()) cfg.fiber_box = parse_box(o.fiber);
  if (o.r) {
    if (!(*o.r > 0)) throw ConfigError("--r must be positive");
    cfg.r_initial = *o.r;
  }
  if (o.max_boxes) cfg.max_boxes = *o.max_boxes;
  if (o.sheets) cfg.sheets = *o.sheets;
  if (!o.out_json.empty()) cfg.out_json = o.out_json;
  if (!o.out_obj.empty()) cfg.out_obj = o.out_obj;
}

RunConfig load(const std::string& path, const Overrides& o, RunMode mode) {
  RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
  cfg.mode = mode;
  apply(cfg, o);
  cfg.validate();
  return cfg;
}

void write_outputs(const BoxFile& file, const RunConfig& cfg) {
  try {
    if (!cfg.out_json.empty()) write_json(file, cfg.out_json);
    if (!cfg.out_obj.empty()) write_obj(file, cfg.out_obj);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

int run_approximate(const std::string& path, const Overrides& o) {
  RunConfig cfg = load(path, o, RunMode::surface);
  AnalyticSystem sys = cfg.build_system();
  SurfaceOptions opt;
  opt.r = cfg.r_initial;
  opt.rho = cfg.rho;
  opt.domain = cfg.domain;
  opt.max_boxes = cfg.max_boxes;
  SurfaceRun run = certified_surface_approximation(sys, cfg.start, opt);
  BoxFile file = to_box_file(run);
  double sum = 0;
  for (const auto& r : file.records) sum += r.test.base_radii.maxCoeff();
  std::printf("boxes %zu  iterations %zu  component tests %zu  replacements %zu  dropped %zu  %s\n",
              file.records.size(), run.stats.iterations, run.stats.component_tests, run.stats.replacements,
              run.stats.dropped, run.truncated ? "truncated" : "complete");
  if (!file.records.empty()) std::printf("average radius %.6g\n", sum / static_cast<double>(file.records.size()));
  write_outputs(file, cfg);
  return kOk;
}

int run_graph(const std::string& path, const Overrides& o) {
  RunConfig cfg = load(path, o, RunMode::graph);
  AnalyticSystem sys = cfg.build_system();
  GraphOptions opt;
  opt.sheets = cfg.sheets;
  opt.fiber_search = cfg.fiber_box;
  if (cfg.start.size() == static_cast<Eigen::Index>(sys.n()))
    opt.fiber_seed = Eigen::VectorXd(cfg.start.tail(static_cast<Eigen::Index>(sys.m())));
  std::vector<GraphSlab> slabs = graph_approximation(sys, *cfg.base_box, cfg.rho, opt);
  std::printf("slabs %zu\n", slabs.size());
  write_outputs(to_box_file(sys, slabs, cfg.rho), cfg);
  return kOk;
}

int run_verify(const std::string& path) {
  BoxFile file;
  try {
    file = read_json_file(path);
  } catch (const Error& e) {
    std::fprintf(stderr, "certsurf: %s\n", e.what());
    return kInputError;
  }
  VerifyReport rep = verify_box_file(file);
  for (const auto& c : rep.checks)
    if (!c.ok) std::fprintf(stderr, "box %d: %s\n", c.id, c.reason.c_str());
  std::printf("verified %zu of %zu boxes\n", rep.checks.size() - rep.failures(), rep.checks.size());
  return rep.ok() ? kOk : kCertFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified interval box approximations of smooth surfaces"};
  app.require_subcommand(1);
  app.fallthrough();
  bool deterministic = true;
  int threads = 1;
  app.add_flag("--deterministic,!--no-deterministic", deterministic, "Reproducible order (always on)");
  app.add_option("--threads", threads, "Worker threads (the run is sequential)")->check(CLI::PositiveNumber);

  Overrides o;
  std::string config_path, json_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "key = value configuration file");
    sub->add_option("-e,--equation", o.equations, "Equation (repeatable)");
    sub->add_option("--variables", o.variables, "Variable order, e.g. 'x y z'");
    sub->add_option("--rho", o.rho, "Contraction factor, e.g. 1/8");
    sub->add_option("--out-json", o.out_json, "Line-delimited JSON box file");
    sub->add_option("--out-obj", o.out_obj, "Wavefront OBJ file (n = 3)");
    sub->add_option("--start", o.start, "Start point, e.g. '0 0 1'");
  };
  CLI::App* approx = app.add_subcommand("approximate", "Certified surface approximation");
  add_common(approx);
  approx->add_option("--r", o.r, "Initial radius");
  approx->add_option("--domain", o.domain, "Domain box 'lo hi lo hi ...'");
  approx->add_option("--max-boxes", o.max_boxes, "Stop after this many boxes");

  CLI::App* graph = app.add_subcommand("graph", "Graph approximation over a base box");
  add_common(graph);
  graph->add_option("--base", o.base, "Base box U");
  graph->add_option("--fiber", o.fiber, "Fiber search box over the center of U");
  graph->add_option("--sheets", o.sheets, "Expected number of sheets");

  CLI::App* verify = app.add_subcommand("verify", "Re-run the certificates in a box file");
  verify->add_option("boxes", json_path, "Box file written by --out-json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  (void)deterministic;
  (void)threads;

  try {
    if (*verify) return run_verify(json_path);
    if (*graph) return run_graph(config_path, o);
    return run_approximate(config_path, o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "certsurf: %s\n", e.what());
    return kInputError;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "certsurf: %s\n", e.what());
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "certsurf: %s\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "certsurf: certification failed: %s\n", e.what());
    return kCertFailure;
  }
}
