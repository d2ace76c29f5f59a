#include "certsurf/export.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "certsurf/parser.hpp"
#include "json.hpp"

namespace certsurf {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json box_json(const IntervalBox& b) {
  json a = json::array();
  for (std::size_t i = 0; i < b.size(); ++i) a.push_back({b[i].lo(), b[i].hi()});
  return a;
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j.at(static_cast<std::size_t>(i)).size()) != cols)
      throw Error("ragged matrix in box file");
    for (Eigen::Index k = 0; k < cols; ++k)
      M(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
  }
  return M;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

IntervalBox box_from(const json& j) {
  IntervalBox b(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const double lo = j.at(i).at(0).get<double>(), hi = j.at(i).at(1).get<double>();
    if (!(lo <= hi)) throw Error("box side with lo > hi in box file");
    b[i] = Interval(lo, hi);
  }
  return b;
}

BoxRecord record_of(const CertifiedPatch& p, const std::vector<int>& exclusions) {
  BoxRecord r;
  r.id = p.id;
  r.V = p.box.frame->V;
  r.U = p.box.frame->U;
  r.local = p.box.local;
  r.test = p.test;
  r.norm_K = p.certificate.norm_K;
  r.margin = p.certificate.margin;
  r.color = p.color;
  r.exclusions = exclusions;
  return r;
}

void describe_system(BoxFile& f, const AnalyticSystem& s) {
  f.n = s.n();
  f.d = s.d();
  f.variables = s.names();
  for (const auto& e : s.equations()) f.equations.push_back(to_string(e, f.variables));
}

}  // namespace

AnalyticSystem BoxFile::system() const {
  std::string src;
  for (const auto& e : equations) src += e + "\n";
  ParsedSystem ps = parse_system(src, variables);
  if (ps.variables.size() != n || ps.equations.size() != n - d) throw Error("box file system does not match n, d");
  return AnalyticSystem(ps.equations, n, d, ps.variables);
}

BoxFile to_box_file(const SurfaceRun& run) {
  BoxFile f;
  describe_system(f, run.system);
  f.rho = run.options.rho;
  f.truncated = run.truncated;
  for (int id : run.live_ids()) {
    const auto idx = static_cast<std::size_t>(id);
    f.records.push_back(record_of(run.patches[idx], run.exclusions[idx]));
  }
  return f;
}

BoxFile to_box_file(const AnalyticSystem& system, const std::vector<GraphSlab>& slabs, double rho) {
  BoxFile f;
  f.mode = "graph";
  describe_system(f, system);
  f.rho = rho;
  const auto N = static_cast<Eigen::Index>(system.n()), M = static_cast<Eigen::Index>(system.m());
  int id = 0;
  for (const auto& s : slabs) {
    BoxRecord r;
    r.id = id++;
    r.V = Eigen::MatrixXd::Identity(N, N);
    r.U = Eigen::MatrixXd::Identity(M, M);
    r.local = s.box();
    r.test = s.test;
    r.norm_K = s.certificate.norm_K;
    r.margin = s.certificate.margin;
    f.records.push_back(std::move(r));
  }
  return f;
}

void write_json(const BoxFile& file, std::ostream& out) {
  json head = {{"type", "header"},
               {"format", "certsurf-boxes"},
               {"version", 1},
               {"mode", file.mode},
               {"variables", file.variables},
               {"equations", file.equations},
               {"n", file.n},
               {"d", file.d},
               {"rho", file.rho},
               {"count", file.records.size()},
               {"truncated", file.truncated}};
  out << head.dump() << '\n';
  for (const auto& r : file.records) {
    json rec = {{"type", "box"},
                {"id", r.id},
                {"frame", {{"V", matrix_json(r.V)}, {"U", matrix_json(r.U)}}},
                {"center", vector_json(r.center())},
                {"box", box_json(r.local)},
                {"r", {{"base", vector_json(r.test.base_radii)}, {"fiber", r.test.fiber_radius}}},
                {"rho", r.test.rho},
                {"test", {{"center", vector_json(r.test.center)}, {"A", matrix_json(r.test.A)}}},
                {"certificate", {{"norm_K", r.norm_K}, {"margin", r.margin}}},
                {"color_tag", r.color == ColorTag::initial ? "initial" : "normal"},
                {"truncated", file.truncated},
                {"exclusions", r.exclusions}};
    out << rec.dump() << '\n';
  }
  if (!out) throw Error("write failed");
}

void write_json(const BoxFile& file, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_json(file, f);
}

BoxFile read_json(std::istream& in) {
  BoxFile f;
  std::string line;
  bool have_header = false;
  std::size_t count = 0;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      if (!have_header) {
        if (j.at("type") != "header") throw Error("box file must start with a header record");
        f.mode = j.at("mode").get<std::string>();
        f.variables = j.at("variables").get<std::vector<std::string>>();
        f.equations = j.at("equations").get<std::vector<std::string>>();
        f.n = j.at("n").get<std::size_t>();
        f.d = j.at("d").get<std::size_t>();
        f.rho = j.at("rho").get<double>();
        f.truncated = j.at("truncated").get<bool>();
        count = j.at("count").get<std::size_t>();
        have_header = true;
        continue;
      }
      BoxRecord r;
      r.id = j.at("id").get<int>();
      r.V = matrix_from(j.at("frame").at("V"));
      r.U = matrix_from(j.at("frame").at("U"));
      r.local = box_from(j.at("box"));
      r.test.center = vector_from(j.at("test").at("center"));
      r.test.A = matrix_from(j.at("test").at("A"));
      r.test.base_radii = vector_from(j.at("r").at("base"));
      r.test.fiber_radius = j.at("r").at("fiber").get<double>();
      r.test.rho = j.at("rho").get<double>();
      r.norm_K = j.at("certificate").at("norm_K").get<double>();
      r.margin = j.at("certificate").at("margin").get<double>();
      r.color = j.at("color_tag") == "initial" ? ColorTag::initial : ColorTag::normal;
      r.exclusions = j.at("exclusions").get<std::vector<int>>();
      f.records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed box file: ") + e.what());
  }
  if (!have_header) throw Error("box file has no header");
  if (count != f.records.size()) throw Error("box file count does not match its records");
  return f;
}

BoxFile read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  return read_json(f);
}

void write_obj(const BoxFile& file, const std::string& path) {
  if (file.n != 3) throw Error("OBJ export requires ambient dimension 3");
  std::string stem = path;
  if (auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos)
    stem.erase(dot);
  const std::string mtl = stem + ".mtl";
  {
    std::ofstream m(mtl);
    if (!m) throw Error("cannot write " + mtl);
    m << "newmtl red\nKd 1 0 0\n\nnewmtl default\nKd 0.7 0.7 0.7\n";
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  const auto slash = mtl.rfind('/');
  out << "mtllib " << (slash == std::string::npos ? mtl : mtl.substr(slash + 1)) << '\n';

  // Corner k has bit i set when coordinate i is at its upper end.
  static const int quads[6][4] = {{0, 2, 6, 4}, {1, 5, 7, 3}, {0, 4, 5, 1},
                                  {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 6, 7, 5}};
  std::size_t base = 1;
  for (const auto& r : file.records) {
    std::array<Eigen::Vector3d, 8> w;
    for (int k = 0; k < 8; ++k) {
      Eigen::Vector3d u;
      for (int i = 0; i < 3; ++i) u[i] = (k >> i) & 1 ? r.local[static_cast<std::size_t>(i)].hi()
                                                      : r.local[static_cast<std::size_t>(i)].lo();
      w[static_cast<std::size_t>(k)] = r.V * u;
      out << "v " << w[static_cast<std::size_t>(k)][0] << ' ' << w[static_cast<std::size_t>(k)][1] << ' '
          << w[static_cast<std::size_t>(k)][2] << '\n';
    }
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& p : w) c += p / 8;
    out << "g box" << r.id << "\nusemtl " << (r.color == ColorTag::initial ? "red" : "default") << '\n';
    for (const auto& q : quads) {
      for (const auto& tri : {std::array<int, 3>{q[0], q[1], q[2]}, std::array<int, 3>{q[0], q[2], q[3]}}) {
        const auto& a = w[static_cast<std::size_t>(tri[0])];
        const auto& b = w[static_cast<std::size_t>(tri[1])];
        const auto& cc = w[static_cast<std::size_t>(tri[2])];
        // Winding follows the frame's handedness; flip to face outward.
        const bool flip = (b - a).cross(cc - a).dot((a + b + cc) / 3 - c) < 0;
        const std::size_t i0 = base + static_cast<std::size_t>(tri[0]);
        const std::size_t i1 = base + static_cast<std::size_t>(flip ? tri[2] : tri[1]);
        const std::size_t i2 = base + static_cast<std::size_t>(flip ? tri[1] : tri[2]);
        out << "f " << i0 << ' ' << i1 << ' ' << i2 << '\n';
      }
    }
    base += 8;
  }
  if (!out) throw Error("write failed");
}

}  // namespace certsurf
