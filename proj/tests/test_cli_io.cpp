#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "certsurf/config.hpp"
#include "certsurf/export.hpp"
#include "certsurf/parser.hpp"
#include "certsurf/verify.hpp"
#include "doctest.h"

using namespace certsurf;
namespace fs = std::filesystem;

namespace {
AnalyticSystem make(const std::string& src) {
  ParsedSystem ps = parse_system(src, std::vector<std::string>{"x", "y", "z"});
  return AnalyticSystem(ps.equations, 3, 2, ps.variables);
}
Eigen::VectorXd v3(double a, double b, double c) { return (Eigen::VectorXd(3) << a, b, c).finished(); }

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "certsurf_test_cli_io";
  fs::create_directories(dir);
  return dir / name;
}

SurfaceRun small_sphere_run() {
  SurfaceOptions opt;
  opt.max_boxes = 40;
  return certified_surface_approximation(make("x^2 + y^2 + z^2 - 1"), v3(0, 0, 1), opt);
}
}  // namespace

TEST_CASE("config parsing") {
  RunConfig c = parse_config(
      "# sphere\nvariables = x y z\nequation = x^2 + y^2 + z^2 - 1\nstart = 0, 0, 1\nr = 0.1\nrho = 1/8\n"
      "domain = -1 1 -1 1 -1 1\nmax_boxes = 100\nout_json = a.json\n");
  CHECK(c.variables == std::vector<std::string>{"x", "y", "z"});
  CHECK(c.equations.size() == 1);
  CHECK(c.start == v3(0, 0, 1));
  CHECK(c.rho == 0.125);
  CHECK(c.domain->size() == 3);
  CHECK(*c.max_boxes == 100);
  CHECK_NOTHROW(c.validate());
  CHECK(c.build_system().n() == 3);

  CHECK(parse_rho("1/3") <= 1.0 / 3.0);
  CHECK(parse_rho("7/8") == 0.875);
  CHECK_THROWS_AS(parse_rho("1"), ConfigError);
  CHECK_THROWS_AS(parse_rho("abc"), ConfigError);
  CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("start 0 0 1"), ConfigError);
  CHECK_THROWS_AS(parse_box("1 0"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/certsurf.cfg"), ConfigError);

  RunConfig bad = parse_config("equation = x^2 + y^2 + z^2 - 1\nstart = 0 0\n");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  RunConfig two = parse_config("equation = x + y + z\nequation = x - y\nstart = 0 0 0\n");
  CHECK_THROWS_AS(two.validate(), ConfigError);
}

TEST_CASE("empty box file is just a header") {
  BoxFile f;
  f.variables = {"x", "y", "z"};
  f.equations = {"z"};
  f.n = 3;
  f.d = 2;
  std::stringstream ss;
  write_json(f, ss);
  std::string line;
  int lines = 0;
  while (std::getline(ss, line)) ++lines;
  CHECK(lines == 1);
}

TEST_CASE("single plane patch round trip") {
  SurfaceOptions opt;
  opt.max_boxes = 1;
  SurfaceRun run = certified_surface_approximation(make("z"), v3(0, 0, 0), opt);
  BoxFile f = to_box_file(run);
  REQUIRE(f.records.size() == 1);
  CHECK(std::fabs(std::fabs(f.records[0].V(2, 2)) - 1) < 1e-14);
  std::stringstream ss;
  write_json(f, ss);
  BoxFile g = read_json(ss);
  CHECK(g.records.size() == 1);
  CHECK(g.records[0].V == f.records[0].V);
  CHECK(g.records[0].test.A == f.records[0].test.A);
  CHECK(verify_box_file(g).ok());
}

TEST_CASE("sphere records re-verify and tampering is caught") {
  SurfaceRun run = small_sphere_run();
  BoxFile f = to_box_file(run);
  const fs::path path = scratch("sphere.json");
  write_json(f, path.string());
  BoxFile g = read_json_file(path.string());
  CHECK(g.records.size() == run.live_count());
  VerifyReport rep = verify_box_file(g);
  CHECK(rep.ok());

  for (std::size_t i = 0; i < g.records.size(); i += 7) {
    BoxFile t = g;
    t.records[i].margin = -t.records[i].margin;
    CHECK(verify_box_file(t).failures() == 1);
  }
  BoxFile t = g;
  t.records[0].norm_K *= 0.5;
  CHECK_FALSE(verify_box_file(t).ok());
  t = g;
  t.records[0].test.center[2] += 0.01;
  CHECK_FALSE(verify_box_file(t).ok());

  std::stringstream broken("{\"type\":\"header\"}\n");
  CHECK_THROWS_AS(read_json(broken), Error);
  std::stringstream garbage("not json\n");
  CHECK_THROWS_AS(read_json(garbage), Error);
}

TEST_CASE("OBJ export is watertight with outward faces") {
  SurfaceRun run = small_sphere_run();
  BoxFile f = to_box_file(run);
  const fs::path path = scratch("sphere.obj");
  write_obj(f, path.string());
  CHECK(fs::exists(scratch("sphere.mtl")));

  std::ifstream in(path);
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<std::size_t, 3>> faces;
  std::vector<std::string> materials;
  std::string line, mtllib;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Eigen::Vector3d v;
      ls >> v[0] >> v[1] >> v[2];
      verts.push_back(v);
    } else if (tag == "f") {
      std::array<std::size_t, 3> t{};
      ls >> t[0] >> t[1] >> t[2];
      faces.push_back(t);
    } else if (tag == "usemtl") {
      std::string m;
      ls >> m;
      materials.push_back(m);
    } else if (tag == "mtllib") {
      ls >> mtllib;
    }
  }
  CHECK(mtllib == "sphere.mtl");
  CHECK(verts.size() == 8 * f.records.size());
  CHECK(faces.size() == 12 * f.records.size());
  REQUIRE(materials.size() == f.records.size());
  CHECK(materials[0] == "red");
  for (std::size_t i = 1; i < materials.size(); ++i) CHECK(materials[i] == "default");

  for (std::size_t b = 0; b < f.records.size(); ++b) {
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < 8; ++k) c += verts[8 * b + k] / 8;
    for (std::size_t k = 0; k < 12; ++k) {
      const auto& t = faces[12 * b + k];
      for (int e = 0; e < 3; ++e) {
        std::size_t u = t[static_cast<std::size_t>(e)], v = t[static_cast<std::size_t>((e + 1) % 3)];
        edges[{std::min(u, v), std::max(u, v)}]++;
        CHECK(u > 8 * b);
        CHECK(u <= 8 * b + 8);
      }
      const Eigen::Vector3d &p = verts[t[0] - 1], &q = verts[t[1] - 1], &r = verts[t[2] - 1];
      CHECK((q - p).cross(r - p).dot((p + q + r) / 3 - c) > 0);
    }
    CHECK(edges.size() == 18);
    for (const auto& [e, n] : edges) CHECK(n == 2);
  }

  BoxFile flat = f;
  flat.n = 4;
  CHECK_THROWS_WITH(write_obj(flat, scratch("bad.obj").string()), "OBJ export requires ambient dimension 3");
}

TEST_CASE("graph slabs export with identity frames") {
  GraphOptions opt;
  opt.fiber_seed = Eigen::VectorXd::Ones(1);
  AnalyticSystem s = make("x^2 + y^2 + z^2 - 1");
  auto slabs = graph_approximation(s, IntervalBox{Interval(-0.1, 0.1), Interval(-0.1, 0.1)}, 0.125, opt);
  BoxFile f = to_box_file(s, slabs, 0.125);
  CHECK(f.mode == "graph");
  std::stringstream ss;
  write_json(f, ss);
  CHECK(verify_box_file(read_json(ss)).ok());
}
