#include "hkglue/gibbons_hawking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"

namespace hkglue {
namespace {

Vec3 base_of(const ChartPoint& p) { return Vec3(p[0], p[1], p[2]); }

double planar_radius(const Vec3& x) { return std::hypot(x.x(), x.y()); }

}  // namespace

double HarmonicPotential::clearance(const Vec3& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const Vec3& p : poles) d = std::min(d, q_distance(p, x));
  if (singular_axis) d = std::min(d, planar_radius(x));
  return d;
}

HarmonicPotential constant_potential(double v) {
  HarmonicPotential V;
  V.value = [v](const Vec3&) { return v; };
  V.gradient = [](const Vec3&) { return Vec3::Zero().eval(); };
  V.kappa0 = v;
  V.name = "constant";
  return V;
}

HarmonicPotential model_potential(int nu, double kappa0) {
  HarmonicPotential V;
  const double s = nu / kPi;
  V.value = [s, kappa0](const Vec3& x) { return kappa0 + s * std::log(planar_radius(x)); };
  V.gradient = [s](const Vec3& x) {
    const double r2 = x.x() * x.x() + x.y() * x.y();
    return Vec3(s * x.x() / r2, s * x.y() / r2, 0.0);
  };
  V.singular_axis = true;
  V.interior_slope = s;
  V.exterior_slope = s;
  V.kappa0 = kappa0;
  V.name = "algstar_model";
  return V;
}

HarmonicPotential single_pole_potential(const Vec3& pole) {
  HarmonicPotential V;
  V.value = [pole](const Vec3& x) { return green_single(pole, x); };
  V.gradient = [pole](const Vec3& x) { return green_single_gradient(pole, x); };
  V.poles = {pole};
  V.exterior_slope = -1.0 / kTwoPi;
  V.name = "green_single";
  return V;
}

HarmonicPotential neck_potential(const NeckPotentialParams& p) {
  HarmonicPotential V;
  V.value = [p](const Vec3& x) { return green_neck(p, x); };
  V.gradient = [p](const Vec3& x) { return green_neck_gradient(p, x); };
  for (int m = 0; m < p.pole_count(); ++m) V.poles.push_back(p.pole(m));
  V.singular_axis = true;
  V.interior_slope = p.nu / kPi;
  V.exterior_slope = -p.b / kPi;
  V.kappa0 = p.kappa0;
  V.T = p.T();
  V.name = "neck";
  return V;
}

HarmonicPotential nonharmonic_control() {
  HarmonicPotential V;
  V.value = [](const Vec3& x) { return planar_radius(x); };
  V.gradient = [](const Vec3& x) {
    const double r = planar_radius(x);
    return Vec3(x.x() / r, x.y() / r, 0.0);
  };
  V.singular_axis = true;
  V.name = "nonharmonic_r";
  return V;
}

double fd_laplacian(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
  const double f0 = f(x);
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    Vec3 a = x, b = x;
    a[i] += h;
    b[i] -= h;
    s += f(a) - 2 * f0 + f(b);
  }
  return s / (h * h);
}

LocalConnection flat_connection(double c) {
  LocalConnection conn;
  conn.fiber_coeff = c;
  conn.A = [](const Vec3&) { return Vec3::Zero().eval(); };
  conn.curvature = [](const Vec3&) { return Alt(3, 2); };
  conn.strategy = "flat";
  return conn;
}

LocalConnection model_connection(int nu) {
  LocalConnection conn;
  const double s = nu / kPi;
  conn.fiber_coeff = s;
  // -(nu/pi) theta2 dtheta1 with dtheta1 = (x dy - y dx) / r^2.
  conn.A = [s](const Vec3& x) {
    const double r2 = x.x() * x.x() + x.y() * x.y();
    return Vec3(s * x.z() * x.y() / r2, -s * x.z() * x.x() / r2, 0.0);
  };
  conn.curvature = [s](const Vec3& x) {
    const double r2 = x.x() * x.x() + x.y() * x.y();
    return star_gradient(Vec3(s * x.x() / r2, s * x.y() / r2, 0.0));
  };
  conn.strategy = "model";
  conn.exact_part = conn.A;
  conn.exact_part_d = conn.curvature;
  return conn;
}

LocalConnection homotopy_connection(const HarmonicPotential& V, const LocalConnection& ref,
                                    const HomotopySpec& spec) {
  LocalConnection conn;
  conn.fiber_coeff = ref.fiber_coeff;
  BaseTwoForm w = [V, ref](const Vec3& x) { return star_gradient(V.gradient(x)) - ref.curvature(x); };
  conn.A = [ref, w, spec](const Vec3& x) { return (ref.A(x) + homotopy_primitive(w, x, spec)).eval(); };
  conn.curvature = [V](const Vec3& x) { return star_gradient(V.gradient(x)); };
  conn.strategy = ref.strategy + "+homotopy";
  conn.exact_part = ref.exact_part;
  conn.exact_part_d = ref.exact_part_d;
  return conn;
}

double connection_residual(const LocalConnection& conn, const HarmonicPotential& V, const Vec3& x, double h) {
  if (conn.exact_part && conn.exact_part_d) {
    const BaseOneForm rest = [&conn](const Vec3& y) { return (conn.A(y) - conn.exact_part(y)).eval(); };
    return (conn.exact_part_d(x) + fd_base_d(rest, x, h) - star_gradient(V.gradient(x))).max_abs();
  }
  const Alt dA = fd_base_d(conn.A, x, h);
  return (dA - star_gradient(V.gradient(x))).max_abs();
}

DifferentialForm HKTripleField::omega(int i) const {
  DifferentialForm f;
  f.chart = chart;
  f.degree = 2;
  auto s = sample;
  f.eval = [s, i](const ChartPoint& p) { return s(p).omega[static_cast<std::size_t>(i)]; };
  f.clearance = clearance;
  return f;
}

DifferentialForm HKTripleField::volume() const {
  DifferentialForm f;
  f.chart = chart;
  f.degree = chart_dim(chart);
  auto s = sample;
  f.eval = [s](const ChartPoint& p) { return s(p).volume; };
  f.clearance = clearance;
  return f;
}

MetricField HKTripleField::metric() const {
  MetricField m;
  m.chart = chart;
  auto s = sample;
  m.eval = [s](const ChartPoint& p) { return s(p).metric; };
  return m;
}

HKTripleField build_gh_triple(const HarmonicPotential& V, const LocalConnection& conn, double L) {
  if (!(L > 0)) throw PreconditionError("build_gh_triple: scale L must be positive");
  HKTripleField t;
  t.chart = ChartId::Cartesian4;
  const double L2 = L * L;
  t.sample = [V, conn, L2](const ChartPoint& p) {
    if (p.chart != ChartId::Cartesian4) throw StructuralError("GH triple lives on the cartesian4 chart");
    const Vec3 x = base_of(p);
    const double v = V.value(x);
    if (!(v > 0)) {
      std::ostringstream os;
      os << "build_gh_triple: V = " << v << " <= 0 at (" << p[0] << ", " << p[1] << ", " << p[2] << ", " << p[3]
         << ")";
      throw DomainError(os.str());
    }
    const Vec3 a = conn.A(x);
    Alt theta(4, 1);
    theta[0] = a.x();
    theta[1] = a.y();
    theta[2] = a.z();
    theta[3] = conn.fiber_coeff;
    const Alt dx = Alt::basis(4, {0}), dy = Alt::basis(4, {1}), dt = Alt::basis(4, {2});

    HKSample s;
    s.omega[0] = L2 * (v * Alt::basis(4, {0, 1}) + wedge(dt, theta));
    s.omega[1] = L2 * (v * Alt::basis(4, {0, 2}) - wedge(dy, theta));
    s.omega[2] = L2 * (wedge(dx, theta) + v * Alt::basis(4, {1, 2}));
    s.volume = Alt(4, 4);
    s.volume[0] = L2 * L2 * v * conn.fiber_coeff;

    Eigen::Vector4d th(theta[0], theta[1], theta[2], theta[3]);
    SmallMatrix g = SmallMatrix::Zero(4, 4);
    g.topLeftCorner(3, 3) = v * Eigen::Matrix3d::Identity();
    g += (th * th.transpose()) / v;
    s.metric = L2 * g;
    return s;
  };
  t.clearance = [V](const ChartPoint& p) { return V.clearance(base_of(p)); };
  return t;
}

HKTripleField pullback_triple(const HKTripleField& t, const ChartMap& F) {
  if (F.to != t.chart) throw StructuralError("pullback_triple: chart mismatch");
  HKTripleField out;
  out.chart = F.from;
  out.sample = [t, F](const ChartPoint& p) {
    const HKSample s = t.sample(F.map(p));
    const SmallMatrix J = F.jacobian(p);
    HKSample r;
    for (std::size_t i = 0; i < 3; ++i) r.omega[i] = pullback(s.omega[i], J);
    r.volume = pullback(s.volume, J);
    r.metric = J.transpose() * s.metric * J;
    return r;
  };
  if (t.clearance) out.clearance = [t, F](const ChartPoint& p) { return t.clearance(F.map(p)); };
  return out;
}

Eigen::Matrix3d q_matrix(const HKSample& s) {
  const double vol = s.volume[0];
  if (vol == 0.0 || !std::isfinite(vol)) throw NumericError("q_matrix: volume form vanishes");
  Eigen::Matrix3d q;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) q(static_cast<int>(i), static_cast<int>(j)) = 0.5 * wedge(s.omega[i], s.omega[j])[0] / vol;
  return q;
}

Eigen::Matrix3d q_matrix(const HKTripleField& t, const ChartPoint& p) { return q_matrix(t.sample(p)); }

Eigen::Matrix3d normalized_q(const Eigen::Matrix3d& q) {
  const double d = q.determinant();
  if (!(d > 0)) throw NumericError("normalized_q: det Q must be positive");
  return q / std::cbrt(d);
}

double q_error(const Eigen::Matrix3d& q) {
  return (normalized_q(q) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

double selfdual_residual(const HKTripleField& t, const ChartPoint& p) {
  const HKSample s = t.sample(p);
  double r = 0;
  for (const Alt& w : s.omega) r = std::max(r, (hodge(w, s.metric) - w).max_abs());
  return r;
}

double closedness_residual(const HKTripleField& t, const ChartPoint& p, double h) {
  if (t.clearance && t.clearance(p) < 2 * h) throw DomainError("closedness_residual: stencil reaches a pole");
  const int n = chart_dim(t.chart);
  // One stencil serves all three forms: (d w)_I = sum_i dx^i ^ d_i w.
  std::array<Alt, 3> d{Alt(n, 3), Alt(n, 3), Alt(n, 3)};
  for (int i = 0; i < n; ++i) {
    ChartPoint a = p, b = p;
    a[i] += h;
    b[i] -= h;
    const HKSample sa = t.sample(a), sb = t.sample(b);
    const Alt dxi = Alt::basis(n, {i});
    for (std::size_t k = 0; k < 3; ++k) d[k] += wedge(dxi, (sa.omega[k] - sb.omega[k]) * (0.5 / h));
  }
  double r = 0;
  for (const Alt& a : d) r = std::max(r, a.max_abs());
  return r;
}

double monopole_flux(const HarmonicPotential& V, double c) {
  if (!(c > 0)) throw PreconditionError("monopole_flux: radius must be positive");
  for (const Vec3& p : V.poles) {
    const double gap = std::abs(planar_radius(p) - c);
    if (gap < 0.05) {
      std::ostringstream os;
      os << "monopole_flux: torus r = " << c << " passes within " << gap << " of a pole";
      throw PreconditionError(os.str());
    }
  }
  auto integrate = [&](int n) {
    double s = 0;
    const double h = kTwoPi / n;
    for (int i = 0; i < n; ++i) {
      const double t1 = i * h;
      const double x = c * std::cos(t1), y = c * std::sin(t1);
      for (int j = 0; j < n; ++j) {
        const Vec3 g = V.gradient(Vec3(x, y, j * h));
        s += x * g.x() + y * g.y();
      }
    }
    return s * h * h;
  };
  double prev = integrate(16);
  for (int n = 32; n <= tol::kFluxMaxPerAxis; n *= 2) {
    const double cur = integrate(n);
    if (std::abs(cur - prev) < tol::kFluxCauchy) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "monopole_flux: no convergence at 4096 points per axis (last values " << prev << ")";
  throw NumericError(os.str());
}

LocalConnection semiflat_connection(const NeckPotentialParams& p) {
  LocalConnection conn;
  conn.fiber_coeff = p.nu / kPi;
  const double sb = p.b / kPi;
  const double a = p.lambda_tilde() * p.lambda;
  const HoloSeries h = p.h;
  // (b/pi) theta2 dtheta1 - Re H dtheta2, H(zeta) = h(a zeta).
  conn.A = [sb, a, h](const Vec3& x) {
    const double r2 = x.x() * x.x() + x.y() * x.y();
    const double reH = h(a * std::complex<double>(x.x(), x.y())).real();
    return Vec3(-sb * x.z() * x.y() / r2, sb * x.z() * x.x() / r2, -reH);
  };
  conn.curvature = [p, sb, a](const Vec3& x) {
    const double r2 = x.x() * x.x() + x.y() * x.y();
    const std::complex<double> hp = a * p.h.derivative(a * std::complex<double>(x.x(), x.y()));
    return star_gradient(Vec3(-sb * x.x() / r2 + hp.imag(), -sb * x.y() / r2 + hp.real(), 0.0));
  };
  conn.strategy = "semiflat";
  conn.exact_part = conn.A;
  conn.exact_part_d = conn.curvature;
  return conn;
}

LocalConnection neck_connection_for(const NeckPotentialParams& p, const Vec3& x0) {
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0;
  for (const Vec3& q : p.poles_rescaled) {
    rmin = std::min(rmin, std::hypot(q.x(), q.y()));
    rmax = std::max(rmax, std::hypot(q.x(), q.y()));
  }
  const double rt = p.lambda * planar_radius(x0);
  const double a = p.lambda_tilde() * p.lambda;

  // star d(G_lambda - V_model): pole sum plus the holomorphic term.
  BaseTwoForm w_inner = [p, a](const Vec3& x) {
    Vec3 g = Vec3::Zero();
    for (int m = 0; m < p.pole_count(); ++m) g += green_single_gradient(p.pole(m), x);
    const std::complex<double> hp = a * p.h.derivative(a * std::complex<double>(x.x(), x.y()));
    g.x() += hp.imag();
    g.y() += hp.real();
    return star_gradient(g);
  };

  if (rt < 0.9 * rmin || rt > 1.1 * rmax) {
    const bool inner = rt < 0.9 * rmin;
    LocalConnection ref = inner ? model_connection(p.nu) : semiflat_connection(p);
    BaseTwoForm w = w_inner;
    if (!inner) {
      // star d(G_lambda - V_SF) in cancellation-free form: the primitive
      // from infinity needs an integrand that keeps decaying.
      w = [p](const Vec3& x) { return star_gradient(semiflat_gap_gradient(p, x)); };
    }
    const HomotopySpec spec{inner ? Contraction::Axis : Contraction::Infinity, Vec3::Zero()};
    const double lo = 0.95 * rmin, hi = 1.05 * rmax;
    LocalConnection conn;
    conn.fiber_coeff = ref.fiber_coeff;
    conn.A = [ref, w, spec, p, inner, lo, hi](const Vec3& x) {
      const double r = p.lambda * planar_radius(x);
      if (inner ? r > lo : r < hi) throw DomainError("neck connection: point left its sub-chart");
      return (ref.A(x) + homotopy_primitive(w, x, spec)).eval();
    };
    conn.curvature = [p](const Vec3& x) { return star_gradient(green_neck_gradient(p, x)); };
    conn.strategy = inner ? "neck_inner_axis" : "neck_outer_infinity";
    conn.exact_part = ref.exact_part;
    conn.exact_part_d = ref.exact_part_d;
    return conn;
  }

  int nearest = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (int m = 0; m < p.pole_count(); ++m) {
    const double d = q_distance(p.pole(m), x0);
    if (d < dmin) {
      dmin = d;
      nearest = m;
    }
  }
  // Use the image of the pole nearest in theta2 so the segment from the
  // centre to x never wraps around the circle.
  Vec3 pm = p.pole(nearest);
  pm.z() += kTwoPi * std::round((x0.z() - pm.z()) / kTwoPi);
  const HomotopySpec spec{Contraction::Point, pm + 1.5 * (x0 - pm)};
  LocalConnection ref = model_connection(p.nu);
  LocalConnection conn;
  conn.fiber_coeff = ref.fiber_coeff;
  conn.A = [ref, w_inner, spec](const Vec3& x) { return (ref.A(x) + homotopy_primitive(w_inner, x, spec)).eval(); };
  conn.curvature = [p](const Vec3& x) { return star_gradient(green_neck_gradient(p, x)); };
  conn.strategy = "neck_pole_point";
  conn.exact_part = ref.exact_part;
  conn.exact_part_d = ref.exact_part_d;
  return conn;
}

}  // namespace hkglue
