#include "hkglue/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <optional>
#include <thread>
#include <sstream>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"
#include "hkglue/models.hpp"
#include "hkglue/parallel.hpp"

namespace hkglue {
namespace {

double planar_r(const Vec3& x) { return std::hypot(x.x(), x.y()); }

double smoothstep5(double s) {
  if (s <= 0) return 0.0;
  if (s >= 1) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep5_d(double s) {
  if (s <= 0 || s >= 1) return 0.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

// Base 2-form (slots xy, x theta2, y theta2) as a 4-form slot set on
// (x, y, theta2, theta3).
Alt lift2(const Alt& w) {
  Alt out(4, 2);
  out.add({0, 1}, w.get({0, 1}));
  out.add({0, 2}, w.get({0, 2}));
  out.add({1, 2}, w.get({1, 2}));
  return out;
}

Alt lift1(const Vec3& a) {
  Alt out(4, 1);
  out[0] = a.x();
  out[1] = a.y();
  out[2] = a.z();
  return out;
}

// star d(G_lambda - V_model): pole sum plus the holomorphic term.
Alt inner_curvature_gap(const NeckPotentialParams& p, const Vec3& x) {
  const double a = p.lambda_tilde() * p.lambda;
  Vec3 g = Vec3::Zero();
  for (int m = 0; m < p.pole_count(); ++m) g += green_single_gradient(p.pole(m), x);
  const std::complex<double> hp = a * p.h.derivative(a * std::complex<double>(x.x(), x.y()));
  g.x() += hp.imag();
  g.y() += hp.real();
  return star_gradient(g);
}

Alt outer_curvature_gap(const NeckPotentialParams& p, const Vec3& x) {
  return star_gradient(semiflat_gap_gradient(p, x));
}

std::string point_text(const ChartPoint& p) {
  std::ostringstream os;
  os << std::setprecision(10) << "(" << p[0] << ", " << p[1] << ", " << p[2] << ", " << p[3] << ")";
  return os.str();
}


}  // namespace

double GluingParams::lambda_tilde() const { return std::pow(lambda, static_cast<double>(nu) / b); }
double GluingParams::T() const { return nu / kPi * std::log(1.0 / lambda); }
double GluingParams::T_flat() const { return (2.0 * nu + 1.0) / kTwoPi * std::log(1.0 / lambda); }
double GluingParams::V_sigma() const { return kappa0 + nu / kPi * std::log(1.0 / sigma()); }

void GluingParams::validate() const {
  std::ostringstream os;
  if (!(lambda > 0 && lambda < 1)) os << "lambda must lie in (0, 1); ";
  if (!(t > 0 && t < 1)) os << "t must lie in (0, 1); ";
  if (!(sigma() < 1)) os << "sigma = lambda / t must be < 1; ";
  if (nu < 1 || nu > 4) os << "nu must lie in 1..4; ";
  if (b < 1 || b > 14) os << "b must lie in 1..14; ";
  if (!(L > 0)) os << "L must be positive; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw ConfigError("GluingParams: " + msg.substr(0, msg.size() - 2));
}

GluingParams default_gluing_params(double lambda, double t) {
  GluingParams p;
  p.lambda = lambda;
  p.t = t;
  p.h.coeffs = {{0.0, 1.0}, {0.25, 0.0}};
  return p;
}

GluingGeometry make_geometry(const GluingParams& p) {
  p.validate();
  GluingGeometry g;
  g.params = p;
  g.neck = choose_monopole_points(p.nu, p.b, p.kappa0, p.seed, p.h, p.lambda);
  g.ring_min = std::numeric_limits<double>::infinity();
  for (const Vec3& q : g.neck.poles_rescaled) {
    g.ring_min = std::min(g.ring_min, planar_r(q));
    g.ring_max = std::max(g.ring_max, planar_r(q));
  }

  // Outermost crossing of G = 1 on the probe ray, in r~.
  auto G = [&](double rt) { return green_neck(g.neck, Vec3(rt / p.lambda, 0.0, 0.0)); };
  double lo = 1.5 * g.ring_max, hi = 1e8;
  if (!(G(lo) > 1.0) || !(G(hi) < 1.0)) {
    std::ostringstream os;
    os << "make_geometry: G_lambda = 1 not bracketed on [" << lo << ", " << hi << "] for lambda = " << p.lambda;
    throw ConfigError(os.str());
  }
  while (hi - lo > tol::kBisection * hi) {
    const double mid = std::sqrt(lo * hi);
    if (G(mid) > 1.0) lo = mid; else hi = mid;
  }
  g.r_lambda = 0.25 * (lo + hi);
  const double g_rl = G(g.r_lambda);
  std::ostringstream os;
  if (!(g_rl >= 1.0 && g_rl <= 100.0)) os << "G_lambda(r_lambda) = " << g_rl << " outside [1, 100]; ";
  // Each damage zone must sit inside one connection sub-chart.
  if (!(2.0 * p.t < 0.9 * g.ring_min)) os << "inner zone 2t = " << 2 * p.t << " reaches the pole ring; ";
  if (!(g.r_lambda > 1.1 * g.ring_max)) os << "r_lambda = " << g.r_lambda << " inside the pole ring; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw ConfigError("make_geometry: " + msg.substr(0, msg.size() - 2));
  return g;
}

double cutoff_phi(double r_tilde, double t) { return 1.0 - smoothstep5(std::log(r_tilde / t) / std::log(2.0)); }
double cutoff_psi(double r_tilde, double r_lambda) { return smoothstep5(std::log(r_tilde / r_lambda) / std::log(2.0)); }
double cutoff_phi_derivative(double r_tilde, double t) {
  return -smoothstep5_d(std::log(r_tilde / t) / std::log(2.0)) / (r_tilde * std::log(2.0));
}
double cutoff_psi_derivative(double r_tilde, double r_lambda) {
  return smoothstep5_d(std::log(r_tilde / r_lambda) / std::log(2.0)) / (r_tilde * std::log(2.0));
}

void AnnulusSpec::validate() const {
  if (!(inner > 0 && outer > inner)) throw PreconditionError("AnnulusSpec: need 0 < inner < outer");
  if (!(lambda > 0)) throw PreconditionError("AnnulusSpec: lambda must be positive");
  if (n_r < 2 || n_theta1 < 1 || n_theta2 < 1) throw PreconditionError("AnnulusSpec: grid too small");
}

std::vector<ChartPoint> AnnulusSpec::grid() const {
  validate();
  std::vector<ChartPoint> out;
  out.reserve(static_cast<std::size_t>(n_r * n_theta1 * n_theta2));
  const double lr = std::log(outer / inner);
  for (int i = 0; i < n_r; ++i) {
    const double r = inner * std::exp(lr * i / (n_r - 1)) / lambda;
    for (int j = 0; j < n_theta1; ++j) {
      // A golden-section phase keeps samples off the nodal rays of the
      // multipoles of symmetric layouts, which half steps would hit.
      const double a = kTwoPi * (j + 0.381966011250105) / n_theta1;
      for (int k = 0; k < n_theta2; ++k) {
        const double t2 = -kPi + kTwoPi * (k + 0.5) / n_theta2;
        out.push_back(make_point(ChartId::Cartesian4, {r * std::cos(a), r * std::sin(a), t2, 0.0}));
      }
    }
  }
  return out;
}

std::array<double, 3> triple_difference(const HKTripleField& a, const HKTripleField& b, const AnnulusSpec& A,
                                        const MetricField& g) {
  const std::vector<ChartPoint> grid = A.grid();
  const auto local = parallel_map(grid.size(), [&](std::size_t k) {
    const ChartPoint& p = grid[k];
    std::array<double, 3> d{0.0, 0.0, 0.0};
    try {
      const HKSample sa = a.sample(p), sb = b.sample(p);
      const SmallMatrix G = g(p);
      for (std::size_t i = 0; i < 3; ++i) d[i] = norm(sa.omega[i] - sb.omega[i], G);
    } catch (const Error& e) {
      throw DomainError("triple_difference: evaluation failed at " + point_text(p) + ": " + e.what());
    }
    return d;
  });
  std::array<double, 3> sup{0.0, 0.0, 0.0};
  for (const auto& d : local)
    for (std::size_t i = 0; i < 3; ++i) sup[i] = std::max(sup[i], d[i]);
  return sup;
}

namespace {

// w1 = V dx^dy + dt^A, w2 = V dx^dt - dy^A, w3 = dx^A + V dy^dt, differenced.
std::array<Alt, 3> gh_difference_at(double v, const Vec3& a) {
  std::array<Alt, 3> w{Alt(3, 2), Alt(3, 2), Alt(3, 2)};
  w[0].add({0, 1}, v);
  w[0].add({0, 2}, -a.x());
  w[0].add({1, 2}, -a.y());
  w[1].add({0, 1}, a.x());
  w[1].add({0, 2}, v);
  w[1].add({1, 2}, -a.z());
  w[2].add({0, 1}, a.y());
  w[2].add({0, 2}, a.z());
  w[2].add({1, 2}, v);
  return w;
}

}  // namespace

std::array<BaseTwoForm, 3> gh_difference_forms(std::function<double(const Vec3&)> dV, BaseOneForm dA) {
  std::array<BaseTwoForm, 3> out;
  for (std::size_t i = 0; i < 3; ++i)
    out[i] = [dV, dA, i](const Vec3& x) { return gh_difference_at(dV(x), dA(x))[i]; };
  return out;
}

double base_closedness(const BaseTwoForm& w, const Vec3& x, double h) {
  // (dw)_{xyt} = d_x w_yt - d_y w_xt + d_t w_xy.
  auto slot = [&](int axis, std::initializer_list<int> s) {
    Vec3 a = x, b = x;
    a[axis] += h;
    b[axis] -= h;
    return (w(a).get(s) - w(b).get(s)) / (2 * h);
  };
  return std::abs(slot(0, {1, 2}) - slot(1, {0, 2}) + slot(2, {0, 1}));
}

Vec3 radial_primitive(const BaseTwoForm& w, const Vec3& x, Contraction kind, double fd_step) {
  if (kind == Contraction::Point) throw PreconditionError("radial_primitive: contraction must be radial");
  const double res = base_closedness(w, x, fd_step);
  if (!(res < tol::kFd)) {
    std::ostringstream os;
    os << "radial_primitive: input not closed, |dw| = " << res << " at (" << x.x() << ", " << x.y() << ", " << x.z()
       << ")";
    throw PreconditionError(os.str());
  }
  return homotopy_primitive(w, x, {kind, Vec3::Zero()});
}

HKTripleField neck_triple(const NeckPotentialParams& p) {
  const HarmonicPotential V = neck_potential(p);
  HKTripleField t;
  t.chart = ChartId::Cartesian4;
  t.sample = [p, V](const ChartPoint& q) {
    const Vec3 x(q[0], q[1], q[2]);
    return build_gh_triple(V, neck_connection_for(p, x)).sample(q);
  };
  t.clearance = [V](const ChartPoint& q) { return V.clearance(Vec3(q[0], q[1], q[2])); };
  return t;
}

HKTripleField semiflat_triple(const NeckPotentialParams& p) {
  return build_gh_triple(semiflat_potential(p), semiflat_connection(p));
}

HKTripleField model_triple_for(const NeckPotentialParams& p, double kappa0) {
  return build_gh_triple(model_potential(p.nu, kappa0), model_connection(p.nu));
}

std::string region_name(GluedRegion r) {
  switch (r) {
    case GluedRegion::Model: return "model";
    case GluedRegion::DamageInner: return "damage_inner";
    case GluedRegion::Neck: return "neck";
    case GluedRegion::DamageOuter: return "damage_outer";
    case GluedRegion::SemiFlat: return "semiflat";
  }
  return "unknown";
}

ApproximateTriple::ApproximateTriple(GluingGeometry g)
    : g_(std::move(g)),
      V_(neck_potential(g_.neck)),
      Vsf_(semiflat_potential(g_.neck)),
      Vm_(model_potential(g_.params.nu, g_.params.kappa0)) {}

GluedRegion ApproximateTriple::region(const Vec3& x) const {
  const double rt = g_.params.lambda * planar_r(x);
  const double t = g_.params.t;
  if (rt <= t) return GluedRegion::Model;
  if (rt < 2 * t) return GluedRegion::DamageInner;
  if (rt <= g_.r_lambda) return GluedRegion::Neck;
  if (rt < 2 * g_.r_lambda) return GluedRegion::DamageOuter;
  return GluedRegion::SemiFlat;
}

namespace {

// G_lambda - V_model = ((nu + b)/pi) log(1/lambda) - kappa0 + sum G_m + Im H,
// smooth up to the axis.
double model_gap(const NeckPotentialParams& p, const Vec3& x) {
  double g = (p.nu + p.b) / kPi * std::log(1.0 / p.lambda) - p.kappa0;
  for (int m = 0; m < p.pole_count(); ++m) g += green_single(p.pole(m), x);
  const double a = p.lambda_tilde() * p.lambda;
  return g + p.h(a * std::complex<double>(x.x(), x.y())).imag();
}

// w_model - w_neck on the inner chart, where A_neck - A_model = K_axis(gap).
std::array<Alt, 3> inner_gap_at(const NeckPotentialParams& p, const Vec3& y) {
  BaseTwoForm w = [&p](const Vec3& z) { return inner_curvature_gap(p, z); };
  return gh_difference_at(-model_gap(p, y), -homotopy_primitive(w, y, {Contraction::Axis, Vec3::Zero()}));
}

// w_neck - w_SF on the outer chart, where A_neck - A_SF = K_inf(gap).
std::array<Alt, 3> outer_gap_at(const NeckPotentialParams& p, const Vec3& y) {
  BaseTwoForm w = [&p](const Vec3& z) { return outer_curvature_gap(p, z); };
  return gh_difference_at(semiflat_gap(p, y), homotopy_primitive(w, y, {Contraction::Infinity, Vec3::Zero()}));
}

}  // namespace

std::array<Vec3, 3> ApproximateTriple::eta_inner(const Vec3& x) const {
  const NeckPotentialParams& p = g_.neck;
  return homotopy_primitive3([&p](const Vec3& y) { return inner_gap_at(p, y); }, x,
                             {Contraction::Axis, Vec3::Zero()});
}

std::array<Vec3, 3> ApproximateTriple::eta_outer(const Vec3& x) const {
  const NeckPotentialParams& p = g_.neck;
  return homotopy_primitive3([&p](const Vec3& y) { return outer_gap_at(p, y); }, x,
                             {Contraction::Infinity, Vec3::Zero()});
}

namespace {

// Neck formula with both corrections, valid on t <= r~ <= 2 r_l.
// eta_pre, when given, holds the eta of whichever damage zone q lies in.
HKSample middle_sample(const GluingGeometry& g, const HarmonicPotential& V, const ChartPoint& q, const Vec3& anchor,
                       const ApproximateTriple& self, const std::array<Vec3, 3>* eta_pre = nullptr) {
  const GluingParams& P = g.params;
  const Vec3 x(q[0], q[1], q[2]);
  const double r = planar_r(x), rt = P.lambda * r;
  HKSample s = build_gh_triple(V, neck_connection_for(g.neck, anchor), P.L).sample(q);
  const double L2 = P.L * P.L;
  Alt dr(4, 1);
  dr[0] = x.x() / r;
  dr[1] = x.y() / r;

  if (rt < 2 * P.t) {
    const double phi = cutoff_phi(rt, P.t);
    const double dphi = cutoff_phi_derivative(rt, P.t) * P.lambda;
    const auto forms = inner_gap_at(g.neck, x);
    const auto eta = eta_pre ? *eta_pre : dphi != 0.0 ? self.eta_inner(x) : std::array<Vec3, 3>{};
    for (std::size_t i = 0; i < 3; ++i) {
      Alt c = phi * lift2(forms[i]);
      if (dphi != 0.0) c += dphi * wedge(dr, lift1(eta[i]));
      s.omega[i] += L2 * c;
    }
  }
  if (rt > g.r_lambda) {
    const double psi = cutoff_psi(rt, g.r_lambda);
    const double dpsi = cutoff_psi_derivative(rt, g.r_lambda) * P.lambda;
    const auto forms = outer_gap_at(g.neck, x);
    const auto eta = eta_pre ? *eta_pre : dpsi != 0.0 ? self.eta_outer(x) : std::array<Vec3, 3>{};
    for (std::size_t i = 0; i < 3; ++i) {
      Alt c = psi * lift2(forms[i]);
      if (dpsi != 0.0) c += dpsi * wedge(dr, lift1(eta[i]));
      s.omega[i] -= L2 * c;
    }
  }
  // Metric and volume stay those of the neck: Q is measured against them.
  return s;
}

}  // namespace

HKSample ApproximateTriple::sample_at(const ChartPoint& q, const Vec3& anchor) const {
  const Vec3 x(q[0], q[1], q[2]);
  switch (region(x)) {
    case GluedRegion::Model: return build_gh_triple(Vm_, model_connection(g_.params.nu), g_.params.L).sample(q);
    case GluedRegion::SemiFlat: return build_gh_triple(Vsf_, semiflat_connection(g_.neck), g_.params.L).sample(q);
    default: return middle_sample(g_, V_, q, anchor, *this);
  }
}

HKTripleField ApproximateTriple::field() const {
  HKTripleField t;
  t.chart = ChartId::Cartesian4;
  t.sample = [this](const ChartPoint& q) { return sample_at(q, Vec3(q[0], q[1], q[2])); };
  const HarmonicPotential V = V_;
  t.clearance = [V](const ChartPoint& q) { return V.clearance(Vec3(q[0], q[1], q[2])); };
  return t;
}

HKTripleField ApproximateTriple::field_near(const Vec3& anchor) const {
  HKTripleField t = field();
  t.sample = [this, anchor](const ChartPoint& q) { return sample_at(q, anchor); };
  return t;
}

namespace {

double seam_jump(const GluingGeometry& g, const HarmonicPotential& V, const HarmonicPotential& Vm,
                 const HarmonicPotential& Vsf, const ApproximateTriple& self, double rt, bool inner) {
  double jump = 0;
  for (int k = 0; k < 64; ++k) {
    const double a = kTwoPi * (k + 0.5) / 64.0;
    const double t2 = -kPi + kTwoPi * ((k * 5) % 64 + 0.5) / 64.0;
    const double r = rt / g.params.lambda;
    const ChartPoint q = make_point(ChartId::Cartesian4, {r * std::cos(a), r * std::sin(a), t2, 0.3});
    const Vec3 x(q[0], q[1], q[2]);
    const HKSample mid = middle_sample(g, V, q, x, self);
    const HKSample side = inner ? build_gh_triple(Vm, model_connection(g.params.nu), g.params.L).sample(q)
                                : build_gh_triple(Vsf, semiflat_connection(g.neck), g.params.L).sample(q);
    for (std::size_t i = 0; i < 3; ++i) jump = std::max(jump, (mid.omega[i] - side.omega[i]).max_abs());
  }
  return jump;
}

}  // namespace

double ApproximateTriple::seam_jump_inner() const { return seam_jump(g_, V_, Vm_, Vsf_, *this, g_.params.t, true); }
double ApproximateTriple::seam_jump_outer() const {
  return seam_jump(g_, V_, Vm_, Vsf_, *this, 2 * g_.r_lambda, false);
}

namespace {

ZoneError zone_error(const ApproximateTriple& a, double inner, double outer, bool inner_zone, int n) {
  const GluingGeometry& g = a.geometry();
  AnnulusSpec A{inner, outer, g.params.lambda, n, n, n};
  const HKTripleField neck = neck_triple(g.neck);
  const HKTripleField other = inner_zone ? model_triple_for(g.neck, g.params.kappa0) : semiflat_triple(g.neck);
  ZoneError out;
  out.triple = triple_difference(neck, other, A, neck.metric());
  const HarmonicPotential V = neck_potential(g.neck);
  const std::vector<ChartPoint> grid = A.grid();
  struct Local {
    double q, eta;
  };
  const std::vector<Local> local = parallel_map(grid.size(), [&](std::size_t k) {
    const ChartPoint& p = grid[k];
    const Vec3 x(p[0], p[1], p[2]);
    const auto eta = inner_zone ? a.eta_inner(x) : a.eta_outer(x);
    // The middle formula covers the closed zone, seams included.
    const HKSample s = middle_sample(g, V, p, x, a, &eta);
    Local l{q_error(q_matrix(s)), 0.0};
    // eta is a primitive of the unit-scale difference; the rescaled triple
    // (lambda L)^2 w has primitive (lambda L)^2 eta, whose norm in the
    // rescaled metric is (lambda L) |eta|_g.
    const double scale = g.params.lambda * g.params.L;
    for (const Vec3& e : eta) l.eta = std::max(l.eta, scale * norm(lift1(e), s.metric));
    return l;
  });
  for (const Local& l : local) {
    out.q = std::max(out.q, l.q);
    out.eta = std::max(out.eta, l.eta);
  }
  return out;
}

}  // namespace

ZoneError inner_zone_error(const ApproximateTriple& a, int n) {
  const double t = a.geometry().params.t;
  return zone_error(a, t, 2 * t, true, n);
}

ZoneError outer_zone_error(const ApproximateTriple& a, int n) {
  const double r = a.geometry().r_lambda;
  return zone_error(a, r, 2 * r, false, n);
}

const LogLogFit& ScanResult::fit(const std::string& zone, const std::string& component) const {
  const std::string key = zone + "/" + component;
  for (const auto& [k, f] : fits)
    if (k == key) return f;
  throw PreconditionError("ScanResult: no fit for " + key);
}

ScanResult error_scan(const std::vector<GluingParams>& ladder,
                      const std::function<ZoneMeasure(const GluingParams&)>& measure) {
  if (ladder.size() < 3) throw PreconditionError("error_scan: regression needs at least 3 ladder points");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i].lambda > ladder[i - 1].lambda)
      throw PreconditionError("error_scan: ladder must be sorted by lambda descending");

  // Entries are independent; futures are joined in ladder order.
  std::vector<std::future<ZoneMeasure>> jobs;
  for (const GluingParams& p : ladder) jobs.push_back(std::async(std::launch::async, measure, p));
  std::vector<ZoneMeasure> measured;
  for (auto& j : jobs) measured.push_back(j.get());

  ScanResult out;
  const ZoneMeasure& keys = measured.front();
  for (std::size_t k = 0; k < keys.size(); ++k) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (measured[i].size() != keys.size() || measured[i][k].first != keys[k].first)
        throw PreconditionError("error_scan: measurement keys differ across the ladder");
      xs.push_back(ladder[i].lambda);
      ys.push_back(measured[i][k].second);
    }
    out.fits.emplace_back(keys[k].first, fit_loglog(xs, ys));
  }
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const std::string& key = keys[k].first;
    const auto slash = key.find('/');
    const LogLogFit& f = out.fits[k].second;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      ScanRow row;
      row.lambda = ladder[i].lambda;
      row.t = ladder[i].t;
      row.zone = key.substr(0, slash);
      row.component = slash == std::string::npos ? "" : key.substr(slash + 1);
      row.sup_error = measured[i][k].second;
      row.fit_exponent = f.slope;
      row.fit_r2 = f.r2;
      row.degenerate = f.degenerate;
      out.rows.push_back(row);
    }
  }
  return out;
}

ZoneMeasure standard_zone_measure(const GluingParams& p, const ZoneMeasureOptions& o) {
  const ApproximateTriple a(make_geometry(p));
  const double V = p.V_sigma();
  ZoneMeasure m;
  const char* names[3] = {"w1", "w2", "w3"};
  if (o.inner) {
    const ZoneError z = inner_zone_error(a, o.n);
    const double v1 = o.divide_logs ? V : 1.0, vh = o.divide_logs ? std::sqrt(V) : 1.0;
    for (std::size_t i = 0; i < 3; ++i) m.emplace_back(std::string("inner/") + names[i], z.triple[i] * v1);
    m.emplace_back("inner/Q", z.q * v1);
    m.emplace_back("inner/eta", z.eta * vh);
  }
  if (o.outer) {
    const ZoneError z = outer_zone_error(a, o.n);
    for (std::size_t i = 0; i < 3; ++i) m.emplace_back(std::string("outer/") + names[i], z.triple[i]);
    m.emplace_back("outer/Q", z.q);
    m.emplace_back("outer/eta", z.eta);
  }
  return m;
}

ZoneMeasure class_bounds(const GluingParams& p, const ZoneMeasureOptions& o) {
  const double l = p.lambda, lt = p.lambda_tilde(), t = p.t;
  const double V = o.divide_logs ? 1.0 : p.V_sigma();
  ZoneMeasure m;
  const char* names[3] = {"w1", "w2", "w3"};
  if (o.inner) {
    for (const char* n : names) m.emplace_back(std::string("inner/") + n, lt * t / V);
    m.emplace_back("inner/Q", (l * l + lt * t * t * t) / (t * t * V));
    m.emplace_back("inner/eta", lt * t * t * t / (t * std::sqrt(V)));
  }
  if (o.outer) {
    for (const char* n : names) m.emplace_back(std::string("outer/") + n, l * l * lt);
    m.emplace_back("outer/Q", l * l * lt * lt);
  }
  return m;
}

void write_scan_csv(std::ostream& os, const ScanResult& r) {
  os << "lambda,t,zone,component,sup_error,fit_exponent,fit_r2\n";
  os << std::setprecision(12);
  for (const ScanRow& row : r.rows) {
    os << row.lambda << ',' << row.t << ',' << row.zone << ',' << row.component << ',' << row.sup_error << ',';
    if (row.degenerate) os << "nan,nan\n";
    else os << row.fit_exponent << ',' << row.fit_r2 << '\n';
  }
}

}  // namespace hkglue
