#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "certsurf/graph_approx.hpp"
#include "certsurf/surface.hpp"

namespace certsurf {

/// Everything needed to rebuild one certified box and re-run its test.
struct BoxRecord {
  int id = 0;
  Eigen::MatrixXd V;  ///< world <- frame
  Eigen::MatrixXd U;  ///< output mixing of the framed system
  IntervalBox local;  ///< emitted box, frame coordinates
  KrawczykInput test;
  double norm_K = 0;
  double margin = 0;
  ColorTag color = ColorTag::normal;
  std::vector<int> exclusions;

  Eigen::VectorXd center() const { return local.midpoint(); }
};

struct BoxFile {
  std::string mode = "surface";
  std::vector<std::string> variables;
  std::vector<std::string> equations;  ///< printed expressions, one per equation
  std::size_t n = 0;
  std::size_t d = 0;
  double rho = 0;
  bool truncated = false;
  std::vector<BoxRecord> records;

  /// World system rebuilt from the stored equations.
  AnalyticSystem system() const;
};

/// Live patches of a run, in id order.
BoxFile to_box_file(const SurfaceRun& run);
/// Slabs of a graph-mode run; the frame is the identity.
BoxFile to_box_file(const AnalyticSystem& system, const std::vector<GraphSlab>& slabs, double rho);

/// Line-delimited JSON: a header record, then one record per box.
void write_json(const BoxFile& file, std::ostream& out);
void write_json(const BoxFile& file, const std::string& path);
/// Throws Error on malformed input.
BoxFile read_json(std::istream& in);
BoxFile read_json_file(const std::string& path);

/// Wavefront OBJ with 8 vertices and 12 triangles per box and a material
/// file next to it (`<stem>.mtl`).  The initial patch uses material red.
/// Throws Error unless n = 3.
void write_obj(const BoxFile& file, const std::string& path);

}  // namespace certsurf
