#pragma once

#include <string>
#include <vector>

#include "certsurf/export.hpp"

namespace certsurf {

struct RecordCheck {
  int id = 0;
  bool ok = false;
  std::string reason;  ///< empty when ok
};

struct VerifyReport {
  std::vector<RecordCheck> checks;
  std::size_t failures() const;
  bool ok() const { return failures() == 0; }
};

/// Re-runs every stored Krawczyk test in the record's frame.  A record
/// passes when the test passes again, the stored margin is positive, the
/// stored norm agrees with the recomputed one to a relative 1e-9, and the
/// emitted base lies inside the tested base.
VerifyReport verify_box_file(const BoxFile& file, double rel_tol = 1e-9);

}  // namespace certsurf
