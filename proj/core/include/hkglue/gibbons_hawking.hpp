#pragma once

// Gibbons-Hawking construction on the chart (x, y, theta2, theta3):
//   g  = L^2 (V (dx^2 + dy^2 + dtheta2^2) + V^-1 Theta^2),  Theta = c dtheta3 + A,
//   w1 = L^2 (V dx^dy + dtheta2^Theta)
//   w2 = L^2 (V dx^dtheta2 - dy^Theta)
//   w3 = L^2 (dx^Theta + V dy^dtheta2)
// The Q-matrix identity and self-duality hold for any V > 0 and any A;
// closedness additionally needs dA = star dV.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hkglue/exterior.hpp"
#include "hkglue/greens.hpp"
#include "hkglue/homotopy.hpp"

namespace hkglue {

struct HarmonicPotential {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
  std::vector<Vec3> poles;
  bool singular_axis = false;
  // Metadata: log slopes near 0 and infinity and the constants kappa0, T.
  double interior_slope = 0.0;
  double exterior_slope = 0.0;
  double kappa0 = 0.0;
  double T = 0.0;
  std::string name;

  // Distance to the poles and, when singular, to the axis r = 0.
  double clearance(const Vec3& x) const;
};

HarmonicPotential constant_potential(double v);
// kappa0 + (nu/pi) log r.
HarmonicPotential model_potential(int nu, double kappa0);
// Single Green's function G_p.
HarmonicPotential single_pole_potential(const Vec3& pole);
HarmonicPotential neck_potential(const NeckPotentialParams& p);
// Deliberately non-harmonic control V = r (negative test input).
HarmonicPotential nonharmonic_control();

// FD Laplacian on flat Q.
double fd_laplacian(const std::function<double(const Vec3&)>& f, const Vec3& x, double h);

// Theta = fiber_coeff dtheta3 + A on a simply connected sub-chart, with the
// curvature F = dA it was built to realise.
struct LocalConnection {
  double fiber_coeff = 1.0;
  BaseOneForm A;
  BaseTwoForm curvature;
  std::string strategy;
  // Optional closed-form part of A with its exact d; residual checks then
  // difference only A - exact_part.
  BaseOneForm exact_part;
  BaseTwoForm exact_part_d;
};

LocalConnection flat_connection(double fiber_coeff = 1.0);
// (nu/pi)(dtheta3 - theta2 dtheta1).
LocalConnection model_connection(int nu);
// Reference connection plus the homotopy primitive of (star dV - F_ref).
LocalConnection homotopy_connection(const HarmonicPotential& V, const LocalConnection& reference,
                                    const HomotopySpec& spec);
// Residual max |dA - star dV|; central differences on the part of A without
// a closed-form derivative.
double connection_residual(const LocalConnection& conn, const HarmonicPotential& V, const Vec3& x, double h);

struct HKSample {
  std::array<Alt, 3> omega;
  Alt volume;
  SmallMatrix metric;
};

struct HKTripleField {
  ChartId chart = ChartId::Cartesian4;
  std::function<HKSample(const ChartPoint&)> sample;
  ScalarEval clearance;

  DifferentialForm omega(int i) const;
  DifferentialForm volume() const;
  MetricField metric() const;
};

// Throws DomainError naming the point where V <= 0.
HKTripleField build_gh_triple(const HarmonicPotential& V, const LocalConnection& conn, double L = 1.0);

// Triple pulled back through a chart map (metric and volume likewise).
HKTripleField pullback_triple(const HKTripleField& t, const ChartMap& F);

// Q_ij with 1/2 w_i ^ w_j = Q_ij dvol0, dvol0 the triple's volume form.
Eigen::Matrix3d q_matrix(const HKTripleField& t, const ChartPoint& p);
Eigen::Matrix3d q_matrix(const HKSample& s);
// det(Q)^{-1/3} Q; NumericError unless det Q > 0.
Eigen::Matrix3d normalized_q(const Eigen::Matrix3d& q);
// |det(Q)^{-1/3} Q - Id|_inf.
double q_error(const Eigen::Matrix3d& q);

// max_i |star w_i - w_i| in the triple's own metric.
double selfdual_residual(const HKTripleField& t, const ChartPoint& p);
// max_i of the largest FD coefficient of d w_i.
double closedness_residual(const HKTripleField& t, const ChartPoint& p, double h);

// Torus {r = c} x S^1_theta2, outward flux of star dV. Trapezoid rule
// doubling from 16 to 4096 points per axis until successive values differ
// by less than 1e-6.
double monopole_flux(const HarmonicPotential& V, double c);

// The neck connection on a sub-chart suited to x: model reference with an
// axis primitive inside the pole ring, semi-flat reference with a primitive
// from infinity outside it, model reference with a point contraction near it.
LocalConnection neck_connection_for(const NeckPotentialParams& p, const Vec3& x);
// Semi-flat connection (nu/pi) dtheta3 + (b/pi) theta2 dtheta1 - Re H dtheta2.
LocalConnection semiflat_connection(const NeckPotentialParams& p);

}  // namespace hkglue
