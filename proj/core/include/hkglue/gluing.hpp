#pragma once

// Approximate hyperkaehler triple on the neck, glued from three exact pieces:
//   r~ <= t            ALG* model triple
//   t <= r~ <= 2 r_l   neck triple + d(phi eta_X - psi eta_SF)
//   r~ >= 2 r_l        semi-flat GH triple
// where d eta_X = w_model - w_neck on the inner chart and
// d eta_SF = w_neck - w_SF on the outer chart. All evaluation happens in
// unrescaled coordinates with L = 1; the lambda^2 rescaling cancels in
// metric norms of 2-forms and in Q.

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "hkglue/gibbons_hawking.hpp"
#include "hkglue/greens.hpp"
#include "hkglue/homotopy.hpp"
#include "hkglue/regression.hpp"

namespace hkglue {

struct GluingParams {
  double lambda = 0.01;
  double t = 0.1;
  int nu = 1;
  int b = 1;
  double kappa0 = 1.0;
  double L = 1.0;
  // Layout seed and holomorphic term of the neck potential.
  std::uint64_t seed = 0;
  HoloSeries h;

  double sigma() const { return lambda / t; }
  double lambda_tilde() const;
  double T() const;
  double T_flat() const;
  // Model potential at unrescaled radius 1/sigma, i.e. r~ = t.
  double V_sigma() const;
  // sigma < 1, 0 < lambda, t < 1, nu in 1..4, b in 1..14, L > 0.
  void validate() const;
};

// Default neck data used by the scans: nu = b = 1, kappa0 = 1, h = i + Y/4.
GluingParams default_gluing_params(double lambda, double t);

struct GluingGeometry {
  GluingParams params;
  NeckPotentialParams neck;
  // In r~ units.
  double r_lambda = 0.0;
  double ring_min = 0.0;
  double ring_max = 0.0;
};

// Solves for the monopole layout and r_lambda. r_lambda is half the outermost
// radius on the ray theta1 = theta2 = 0 where G_lambda = 1, so that
// 1 < G_lambda(r_lambda) <= 100 there. ConfigError when no root exists or the
// damage zones leave their connection sub-charts.
GluingGeometry make_geometry(const GluingParams& p);

// Quintic smoothstep in log r~: phi = 1 for r~ <= t, 0 for r~ >= 2t; psi = 0
// for r~ <= r_l, 1 for r~ >= 2 r_l.
double cutoff_phi(double r_tilde, double t);
double cutoff_psi(double r_tilde, double r_lambda);
// d/dr~ of the cutoffs.
double cutoff_phi_derivative(double r_tilde, double t);
double cutoff_psi_derivative(double r_tilde, double r_lambda);

// Sample grid on {inner <= r~ <= outer} x S^1 x S^1 (theta3 = 0), r~ = lambda r.
struct AnnulusSpec {
  double inner = 1.0;
  double outer = 2.0;
  double lambda = 1.0;
  int n_r = 8;
  int n_theta1 = 8;
  int n_theta2 = 8;

  void validate() const;
  std::vector<ChartPoint> grid() const;
};

// Sup over the grid of |a_i - b_i|_g for i = 1, 2, 3. Evaluation failures are
// rethrown naming the grid point.
std::array<double, 3> triple_difference(const HKTripleField& a, const HKTripleField& b, const AnnulusSpec& A,
                                        const MetricField& g);

// GH triple differences for a common fiber coefficient, from dV and dA.
std::array<BaseTwoForm, 3> gh_difference_forms(std::function<double(const Vec3&)> dV, BaseOneForm dA);

// eta with d eta = w by the radial homotopy (Axis or Infinity). Checks that
// |dw| < 1e-5 at x by central differences first (PreconditionError otherwise).
Vec3 radial_primitive(const BaseTwoForm& w, const Vec3& x, Contraction kind, double fd_step = 1e-3);
// |dw| at x by central differences on the base.
double base_closedness(const BaseTwoForm& w, const Vec3& x, double h);

// Neck triple with the connection sub-chart picked per evaluation point.
HKTripleField neck_triple(const NeckPotentialParams& p);
// Semi-flat GH triple.
HKTripleField semiflat_triple(const NeckPotentialParams& p);
// ALG* model triple without the r > R restriction (the gluing uses it for
// r~ <= 2t only, where it is positive).
HKTripleField model_triple_for(const NeckPotentialParams& p, double kappa0);

enum class GluedRegion { Model, DamageInner, Neck, DamageOuter, SemiFlat };
std::string region_name(GluedRegion r);

class ApproximateTriple {
 public:
  explicit ApproximateTriple(GluingGeometry g);

  const GluingGeometry& geometry() const { return g_; }
  GluedRegion region(const Vec3& x) const;
  // The glued triple. Each sample uses the connection sub-chart of its own
  // point; field_near(anchor) freezes the sub-chart at the anchor so finite
  // difference stencils see one gauge.
  HKTripleField field() const;
  HKTripleField field_near(const Vec3& anchor) const;

  // eta_X and eta_SF for the three components.
  std::array<Vec3, 3> eta_inner(const Vec3& x) const;
  std::array<Vec3, 3> eta_outer(const Vec3& x) const;

  // Max jump between the two one-sided formulas over 64 seam points.
  double seam_jump_inner() const;
  double seam_jump_outer() const;

 private:
  HKSample sample_at(const ChartPoint& p, const Vec3& anchor) const;

  GluingGeometry g_;
  HarmonicPotential V_;
  HarmonicPotential Vsf_;
  HarmonicPotential Vm_;
};

struct ZoneError {
  std::array<double, 3> triple{};
  double q = 0.0;
  // Sup over the zone of the three eta norms (inner zone: eta_X, outer:
  // eta_SF), measured in the rescaled metric: lambda L |eta|_g.
  double eta = 0.0;
};

// Sup of |w_neck - w_model|_g, |Q - Id| and |eta_X| over {t <= r~ <= 2t}
// on an n^3 grid.
ZoneError inner_zone_error(const ApproximateTriple& a, int n = 8);
// Same over {r_l <= r~ <= 2 r_l} against the semi-flat triple.
ZoneError outer_zone_error(const ApproximateTriple& a, int n = 8);

struct ScanRow {
  double lambda = 0.0;
  double t = 0.0;
  std::string zone;
  std::string component;
  double sup_error = 0.0;
  double fit_exponent = 0.0;
  double fit_r2 = 0.0;
  bool degenerate = false;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  // Keyed by "zone/component".
  std::vector<std::pair<std::string, LogLogFit>> fits;

  const LogLogFit& fit(const std::string& zone, const std::string& component) const;
};

// Measured errors for one ladder entry, keyed like ScanResult::fits.
using ZoneMeasure = std::vector<std::pair<std::string, double>>;

// Runs the measurement on each ladder entry (sorted by lambda descending,
// at least 3 entries) and fits log(error) against log(lambda) per key.
ScanResult error_scan(const std::vector<GluingParams>& ladder,
                      const std::function<ZoneMeasure(const GluingParams&)>& measure);

struct ZoneMeasureOptions {
  bool inner = true;
  bool outer = true;
  // Multiply inner-zone errors by the closed-form V(1/sigma) power of their
  // class (triple and Q: V, eta: V^{1/2}) so that pure powers remain.
  bool divide_logs = false;
  int n = 8;
};

// Standard measurement: zone errors of the assembled triple, keyed
// "inner|outer/w1|w2|w3|Q|eta".
ZoneMeasure standard_zone_measure(const GluingParams& p, const ZoneMeasureOptions& o = {});

// The class bounds the measurements are compared against, with the same keys
// and the same log treatment (no outer/eta: no bound is stated for it):
//   inner/w_i  lambda~ t V^-1
//   inner/Q    (lambda^2 + lambda~ t^3) (t^2 V)^-1
//   inner/eta  lambda~ t^3 (t V^{1/2})^-1
//   outer/w_i  lambda^2 lambda~
//   outer/Q    lambda^2 lambda~^2
ZoneMeasure class_bounds(const GluingParams& p, const ZoneMeasureOptions& o = {});

void write_scan_csv(std::ostream& os, const ScanResult& r);

}  // namespace hkglue
