#pragma once

// Scale functions of the collapsing metric g_lambda = lambda~^2 g~_lambda on
// the neck side S_b. Points are base points (x, y, theta2) in unrescaled
// coordinates; r~ = lambda r and d~ = lambda d^Q.
//
// Piecewise definitions are joined on their transition bands by the quintic
// smoothstep in log2 of the controlling variable, so every function below is
// smooth and each formula holds exactly off the bands.

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "hkglue/errors.hpp"
#include "hkglue/gluing.hpp"
#include "hkglue/greens.hpp"

namespace hkglue {

struct ScaleParams {
  // Carries lambda, nu, b, kappa0, h and the pole set P.
  NeckPotentialParams neck;
  // Cutoff radius of the ALG* model (unrescaled).
  double R0 = 2.0;
  // Separation constant of the rescaled layout.
  double iota0 = 0.5;
  // In r~ units.
  double r_lambda = 50.0;

  double lambda() const { return neck.lambda; }
  double lambda_tilde() const { return neck.lambda_tilde(); }
  double T() const { return neck.T(); }
  double T_flat() const { return neck.T_flat(); }
  // ConfigError when a constant is non-positive, P is empty, the bands are
  // out of order (2 lambda R0 < iota0/4, 2/iota0 < r_lambda) or a log piece of
  // L_T is non-positive at the end of its range.
  void validate() const;
};

// R0 as given, iota0 from the realized layout, r_lambda from the geometry.
ScaleParams make_scale_params(const GluingGeometry& g, double R0 = 2.0);

// Quintic smoothstep on [0, 1], clamped.
double smoothstep5(double u);

// Smoothing of r~: lambda R0 inside, r~ on [2 lambda R0, r_l], 2 r_l outside.
double scale_r(const Vec3& x, const ScaleParams& p);
// Pole scale from the nearest pole distance d = d^Q(x, P):
//   (T_flat)^{-1/2}                        d <= 1/T_flat
//   (T_flat)^{1/2} d                       2/T_flat <= d <= 1
//   (T_flat + log(1/d) / 2 pi)^{1/2} d     d >= 2
double scale_d(const Vec3& x, const ScaleParams& p);
//   1                                      r~ <= lambda R0
//   T + kappa0 + (nu/pi) log r~            2 lambda R0 <= r~ <= iota0/4
//   T + Im h(0) - (b/pi) log r~            2/iota0 <= r~ <= r_l
//   1                                      r~ >= 2 r_l
double scale_LT(const Vec3& x, const ScaleParams& p);
//   lambda~ L_T^{1/2} r                    d~(x, P) >= 2 iota0
//   lambda~ lambda d                       d~(x, P) <= iota0/4
double scale_s(const Vec3& x, const ScaleParams& p);

enum class WeightRegion { Sb, Regular, I1 };
std::string weight_region_name(WeightRegion r);

class UnsupportedRegionError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Radius (r~) beyond which the S_b weight has reached the regular value 1.
// The blend from s to 1 runs over [2 r_l, weight_interface(p)].
double weight_interface(const ScaleParams& p);

// rho = s on S_b, 1 on the regular region; I1 regions are unsupported.
double weight_rho(const Vec3& x, WeightRegion region, const ScaleParams& p);

struct ScalePoint {
  Vec3 x = Vec3::Zero();
  WeightRegion region = WeightRegion::Sb;
};

// max over samples of rho^{-mu} |field|, where field returns the pointwise
// g_lambda norm. PreconditionError on an empty sample set.
double weighted_c0_norm(const std::function<double(const ScalePoint&)>& field, double mu,
                        const std::vector<ScalePoint>& samples, const ScaleParams& p);

// Path-length surrogate for d_{g_lambda}: the horizontal lift of the straight
// base segment, lambda~ lambda int max(G_lambda, 1)^{1/2} |dx|. An upper bound
// for the distance on the neck.
double path_distance(const Vec3& x, const Vec3& y, const ScaleParams& p, int steps = 64);

struct ComparabilityReport {
  // max of s(y)/s(x) and s(x)/s(y) over sampled pairs with d^(x, y) < s(x)/4.
  double C0 = 1.0;
  // max |s(x) - s(y)| / d^(x, y).
  double lipschitz = 0.0;
  int pairs = 0;
};

// n_x base points over S_b (a quarter of them near poles), n_y partners each
// at random surrogate distance below s(x)/4 along random directions.
ComparabilityReport comparability(const ScaleParams& p, int n_x = 200, int n_y = 20, std::uint64_t seed = 0);

struct ScaleProfileRow {
  std::string ray;
  double r_tilde = 0.0;
  double s = 0.0;
  double d = 0.0;
  double LT = 0.0;
  double rho = 0.0;
};

// Two probe rays at theta2 = 0: "pole" through the first pole, "gap" rotated
// from it by pi / |P|. Log-spaced r~ from lambda R0 / 2 to
// 4 r_l.
std::vector<ScaleProfileRow> scale_profile(const ScaleParams& p, int n = 64);
// Columns: ray,r_tilde,s,d,LT,rho.
void write_scale_profile_csv(std::ostream& os, const std::vector<ScaleProfileRow>& rows);

}  // namespace hkglue
