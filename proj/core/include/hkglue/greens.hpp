#pragma once

// Green's functions on Q = R^2 x S^1 (circle of length 2 pi) normalised by
// -Delta G = 2 pi delta, plus the neck potential built from 2(nu + b) of them.
//
// Base points are (x, y, theta2) in unrescaled coordinates. Rescaled
// quantities carry a tilde in the docs: x~ = lambda x, r~ = lambda r.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hkglue {

using Vec3 = Eigen::Vector3d;

// Flat distance on Q; the theta2 difference is reduced to (-pi, pi].
double q_distance(const Vec3& a, const Vec3& b);
double wrap_angle(double dtheta);

// G depends on x - p only through the planar distance rho and the reduced
// angle difference. Two independent evaluators are exposed for cross-checks.
double green_fourier_bessel(double rho, double dtheta);
double green_image_sum(double rho, double dtheta);

// Dispatches to the Fourier-Bessel series for rho >= 1, image sum below.
// Throws DomainError within 1e-8 of the pole.
double green_single(const Vec3& pole, const Vec3& x);
// Gradient in (x, y, theta2) with respect to x.
Vec3 green_single_gradient(const Vec3& pole, const Vec3& x);

// Finite power series h(z) = sum_k c_k z^k.
struct HoloSeries {
  std::vector<std::complex<double>> coeffs;

  std::complex<double> operator()(std::complex<double> z) const;
  std::complex<double> derivative(std::complex<double> z) const;
};

struct NeckPotentialParams {
  int nu = 1;
  int b = 1;
  double kappa0 = 0.0;
  double lambda = 0.01;
  double rho0 = 1.0;
  std::uint64_t seed = 0;
  HoloSeries h;
  // Rescaled pole positions p~_m (theta2 = 0), paired so that
  // p~_{N-1-m} = iota(p~_m) with 0-based m.
  std::vector<Vec3> poles_rescaled;

  int pole_count() const { return 2 * nu + 2 * b; }
  double lambda_tilde() const;
  double T() const;
  double T_flat() const;
  // Unrescaled pole p_m = p~_m / lambda.
  Vec3 pole(int m) const;
  double balancing_residual() const;
  // Checks pairing, balancing (1e-10) and derived-quantity consistency.
  void validate() const;
  NeckPotentialParams with_lambda(double lambda) const;
};

// Places 2 nu + 2 b points at a common radius rho0, iota-paired, on equally
// spaced angles (seed 0) or deterministically jittered angles (seed != 0),
// and solves the balancing equation for rho0 by bisection on [1e-6, 1e3].
NeckPotentialParams choose_monopole_points(int nu, int b, double kappa0, std::uint64_t seed, HoloSeries h = {},
                                           double lambda = 0.01);

// iota(x, y, theta2) = (-x, -y, -theta2) on the base.
Vec3 iota_base(const Vec3& x);

// Distance from x to the nearest unrescaled pole.
double pole_clearance(const NeckPotentialParams& p, const Vec3& x);

double green_neck(const NeckPotentialParams& p, const Vec3& x);
Vec3 green_neck_gradient(const NeckPotentialParams& p, const Vec3& x);

// G_lambda - V_SF and its gradient, evaluated as
//   -(1/2 pi) sum log|1 - p_m / z| + Bessel corrections,
// which is exact and free of cancellation: it decays like the multipole
// tail instead of bottoming out at rounding level.
double semiflat_gap(const NeckPotentialParams& p, const Vec3& x);
Vec3 semiflat_gap_gradient(const NeckPotentialParams& p, const Vec3& x);

// Deviations of G_lambda from the leading model in each asymptotic regime.
double deviation_near_origin(const NeckPotentialParams& p, const Vec3& x);
double deviation_near_infinity(const NeckPotentialParams& p, const Vec3& x);
double deviation_near_pole(const NeckPotentialParams& p, const Vec3& x, int m);
double deviation_bounded(const NeckPotentialParams& p, const Vec3& x);

// Realised separation constant: the largest iota0 with
// iota0 <= d~(p_m, 0), d~(p_a, p_b) <= 1 / iota0.
double realized_iota0(const NeckPotentialParams& p);

enum class Regime { Origin, Infinity, Pole, Bounded };
std::string regime_name(Regime r);

struct RegimeReport {
  Regime regime = Regime::Bounded;
  double lambda = 0.0;
  Vec3 x = Vec3::Zero();
  int pole_index = -1;
  double predicted = 0.0;
  double observed = 0.0;
};

// Partition: pole if d~(x, P) <= iota0/4, else origin if r~ < 1/R0, else
// infinity if r~ > R0, else bounded. The predicted value is the bound shape
// with unit constant.
RegimeReport asymptotic_regime_report(const NeckPotentialParams& p, const Vec3& x, double R0 = 2.0);

}  // namespace hkglue
