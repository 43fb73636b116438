#pragma once

// Closed-form model spaces.
//
// ALG model: flat C x C with coordinates (U, V) = (u1 + i u2, v1 + i v2),
// V modulo the lattice L (Z + tau Z), (U, V) ~ (e^{2 pi i beta} U, e^{-2 pi i beta} V).
//   w1 = du1^du2 + dv1^dv2,  w2 + i w3 = dU ^ dV.
// ALG* model: Gibbons-Hawking with V = kappa0 + (nu/pi) log r and
// Theta = (nu/pi)(dtheta3 - theta2 dtheta1), scaled by L^2.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hkglue/gibbons_hawking.hpp"

namespace hkglue {

// One row of the table of ALG fiber types.
struct AlgTableRow {
  std::string tag;
  double beta;
  // Empty for I0*, which admits any tau.
  std::optional<std::complex<double>> tau;
  int b2;
};

const std::vector<AlgTableRow>& alg_table();
// ConfigError for an unknown tag / beta.
const AlgTableRow& alg_row_by_tag(const std::string& tag);
const AlgTableRow& alg_row_by_beta(double beta);

struct ALGParams {
  std::string tag = "I0*";
  double beta = 0.5;
  std::complex<double> tau{0.0, 1.0};
  double L = 1.0;
  double R = 1.0;

  // (beta, tau) must match the table row for tag; Im tau > 0; L, R > 0.
  void validate() const;
};

// Builds validated params from the table; tau is required only for I0*.
ALGParams make_alg_params(const std::string& tag, double L, double R,
                          std::optional<std::complex<double>> tau = std::nullopt);

struct ALGStarParams {
  int nu = 1;
  double kappa0 = 1.0;
  double L = 1.0;
  double R = 2.0;

  // Smallest admissible R, e^{(pi/nu)(1 - kappa0)}.
  double r_min() const;
  // nu >= 1, L > 0, R > r_min().
  void validate() const;
};

// Flat triple on the Alg4 chart.
HKTripleField alg_model_triple(const ALGParams& p);
// Area of the V-torus computed by integrating w1 over a fundamental cell.
double alg_fiber_area(const ALGParams& p, int grid = 16);
// The sector identification (U, V) -> (e^{2 pi i beta} U, e^{-2 pi i beta} V).
ChartMap alg_sector_map(const ALGParams& p);
// Representative of a point with arg U in [0, 2 pi beta) and V reduced to the
// fundamental parallelogram.
ChartPoint alg_reduce(const ALGParams& p, const ChartPoint& x);

// GH model triple on the Cartesian4 chart; DomainError for r <= R.
HKTripleField algstar_model_triple(const ALGStarParams& p);
// Same triple on the Polar4 chart (r, theta1, theta2, theta3).
HKTripleField algstar_model_triple_polar(const ALGStarParams& p);
// lambda^2 times the L = 1 triple, expressed in (x~, y~, theta2, theta3)
// with x~ = lambda x; the r > R domain check uses the unrescaled radius.
HKTripleField algstar_rescaled_triple(const ALGStarParams& p, double lambda);
// Holomorphic coordinate u = r^2 e^{2 i theta1} = (x + i y)^2 (diagnostic).
std::complex<double> algstar_holomorphic_coordinate(const ChartPoint& p);

// Polar4 -> Cartesian4 coordinate map.
ChartMap polar_to_cartesian_map();

// Deck transformations of the nilmanifold and the involution, on Polar4.
//   sigma1: theta1 + 2 pi
//   sigma2: (theta1, theta2 + 2 pi, theta3 + 2 pi theta1)
//   sigma3: theta3 + 2 pi^2 / nu
//   iota:   (r, theta1 + pi, -theta2, -theta3)
ChartMap deck_sigma1();
ChartMap deck_sigma2();
ChartMap deck_sigma3(int nu);
ChartMap involution_iota();

// V_SF = T - (b/pi) log r~ + Im h(lambda~ zeta~) on unrescaled base points,
// where r~ = lambda r and lambda~ zeta~ = lambda~ lambda (x + i y).
HarmonicPotential semiflat_potential(double T, int b, const HoloSeries& h, double lambda, double lambda_tilde);
HarmonicPotential semiflat_potential(const NeckPotentialParams& p);

// A gauge function f(r, theta1, theta2) with optional closed-form gradient
// (d/dr, d/dtheta1, d/dtheta2); without one, central differences are used.
struct GaugeFunction {
  std::function<double(double r, double t1, double t2)> value;
  std::function<Vec3(double r, double t1, double t2)> gradient;

  Vec3 grad(double r, double t1, double t2) const;
};

// Connection (nu/pi)(dtheta3 - theta2 dtheta1 + df + q dtheta2) on the
// Cartesian base.
LocalConnection twisted_connection(int nu, const GaugeFunction& f, double q);

struct GaugeNormalization {
  // The constant with f(r, t1, t2) + f(r, t1 + pi, -t2) = c.
  double c = 0.0;
  double q = 0.0;
  // F = phi_f o phi_q on Cartesian4, so F^* = phi_q^* phi_f^*:
  //   phi_q(t1, t2, t3) = (t1 - q, t2, t3 - q t2),
  //   phi_f(r, t1, t2, t3) = (r, t1, t2, t3 + c/2 - f).
  ChartMap map;
};

// PreconditionError when f fails the iota-compatibility sampling test (1e-10).
GaugeNormalization gauge_normalize(const GaugeFunction& f, double q, int samples = 64, std::uint64_t seed = 1);

// Plain-text key = value model description, '#' starts a comment.
//   family = ALG | ALGstar
//   ALG:     beta (or tag), tau (only for I0*: "re,im", "i" or "rho"), L, R
//   ALGstar: nu, kappa0, L, R
// Unknown keys, missing keys and table conflicts raise ConfigError.
using ModelConfig = std::variant<ALGParams, ALGStarParams>;
ModelConfig parse_model_config(const std::string& text);

}  // namespace hkglue
