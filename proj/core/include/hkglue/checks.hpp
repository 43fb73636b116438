#pragma once

// Whole-library property checks at fixed tolerances. Each check reruns one
// group of invariants on a deterministic sample and returns its measured
// metrics; the command-line driver and the acceptance suite both consume
// these and only differ in how they print them.

#include <cstdint>
#include <string>
#include <vector>

#include "hkglue/constants.hpp"
#include "hkglue/models.hpp"

namespace hkglue {

// Default thresholds; every field can be overridden per run.
struct CheckTolerances {
  double q_identity = tol::kAlgebraic;          // max |Q - Id|
  double selfdual = tol::kSelfDual;             // max self-duality residual
  double closed = tol::kGluedClosed;            // d omega, harmonic potentials
  double nonharmonic_floor = tol::kNonHarmonicFloor;  // d omega, control
  double iota_invariance = 1e-10;
  double decay_slope_max = -0.9;                // single-pole exponential decay
  double exponent_pure = tol::kExponentPure;
  double exponent_log = tol::kExponentLog;
  double flux = 1e-5;
  double balancing = tol::kAlgebraic;
  double outer_slope_min = 1.8;
  double roundtrip = 1e-11;
  double norm_ratio_max = 2.0;
  double scalar_oracle = 1e-14;
  // Upper bound on the realized comparability constant and Lipschitz ratio
  // of the scale function.
  double comparability_max = 4.0;
  // Wall-clock budgets in seconds, in check order 1..8.
  double budget[8] = {30, 30, 120, 60, 1, 300, 30, 10};
};

// Sets one field by name ("q_identity", "flux", ...). ConfigError on an
// unknown name or a non-positive value where positivity is required.
void set_tolerance(CheckTolerances& t, const std::string& name, double value);
std::vector<std::string> tolerance_names();

struct Metric {
  std::string key;
  double value = 0.0;
};

struct CheckResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<Metric> metrics;
  // Failed sub-conditions, empty on a pass.
  std::vector<std::string> failures;
  // Wall-clock; excluded from serialize() so reports stay byte-stable.
  double seconds = 0.0;

  double metric(const std::string& key) const;
};

struct ModelResiduals {
  double q_residual_max = 0.0;
  double selfdual_residual_max = 0.0;
  double closedness_residual_max = 0.0;
  double iota_invariance_residual = 0.0;
  int samples = 0;
};

// Residuals of one model triple at `samples` random points. For ALG the
// invariance residual is against the sector identification, for ALG*
// against the involution. With inject_nonharmonic the potential is replaced
// by the non-harmonic control, which must break closedness.
ModelResiduals model_residuals(const ModelConfig& cfg, std::uint64_t seed, int samples = 200,
                               bool inject_nonharmonic = false);

// Criteria, in order:
//   1 Q = Id and self-duality for ALG, ALG* and neck triples
//   2 closedness for harmonic potentials, failure for the control
//   3 Green's function decay, origin, infinity and bounded regimes
//   4 torus fluxes and per-pole jumps
//   5 closed-form balancing radius
//   6 gluing error exponents on the two ladders
//   7 Donaldson round trips and the quantitative inverse function bound
//   8 lattice, monodromy and Betti bookkeeping
CheckResult check_hk_algebra(std::uint64_t seed, const CheckTolerances& t = {}, int samples = 1000);
CheckResult check_closedness(std::uint64_t seed, const CheckTolerances& t = {}, int samples = 60);
CheckResult check_green_asymptotics(const CheckTolerances& t = {});
CheckResult check_flux(const CheckTolerances& t = {});
CheckResult check_balancing(const CheckTolerances& t = {});
CheckResult check_gluing_scaling(const CheckTolerances& t = {}, int n = 8);
CheckResult check_donaldson(std::uint64_t seed, const CheckTolerances& t = {});
CheckResult check_topology(const CheckTolerances& t = {});

// Checks 1..8 in order.
std::vector<CheckResult> run_all_checks(std::uint64_t seed, const CheckTolerances& t = {});

// Deterministic text rendering: metrics at 17 significant digits, verdicts
// without the runtime budget, no timing.
std::string serialize(const std::vector<CheckResult>& results);

}  // namespace hkglue
