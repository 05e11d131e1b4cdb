#ifndef GEQLAB_VERIFY_HPP
#define GEQLAB_VERIFY_HPP

#include "geqlab/chart.hpp"
#include "geqlab/common.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace geq {

enum class Depth { quick, full };

struct CheckResult {
  std::string name;
  bool executed = true;   // false: skipped after a structural failure (quick mode)
  bool passed = false;
  double residual = 0.0;  // measured worst value
  double tolerance = 0.0;
  long samples = 0;
  std::string note;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool overall = false;  // every executed check passed, nothing skipped
  std::uint64_t seed = 0;
  std::string depth;

  std::string summary() const;  // one line per check, human readable
};

nlohmann::json to_json(const VerificationReport& report);

// Runs the full identity battery against a model: positive definiteness,
// spectrum/profile agreement, adjugate identity, closed-form cross-checks,
// torsion, brackets, conservation, independence, ordering, geodesic
// equivalence both ways, leaf restriction, and the linear-integral identities
// when a constant eigenvalue is present. Failures are recorded, not thrown.
// quick: 1e2 samples / 1e3 steps and structural failures short-circuit the
// dynamics checks; full: 1e4 samples / 1e5 steps, everything always runs.
VerificationReport run_battery(const ChartModel& model, std::uint64_t seed, Depth depth);

}  // namespace geq

#endif
