#include "hkglue/greens.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"
#include "hkglue/random.hpp"

namespace hkglue {
namespace {

constexpr int kImageCount = 100;

// Image sum: (1/2) sum_{|n|<=K} f(theta - 2 pi n) with f(u) = (rho^2+u^2)^{-1/2},
// tail replaced by its renormalised integral plus midpoint Euler-Maclaurin
// corrections at t = K + 1/2.
struct ImageTerms {
  double value;
  double d_rho;
  double d_theta;
};

ImageTerms image_sum(double rho, double th, bool want_gradient) {
  const double r2 = rho * rho;
  double s = 0, g_rho = 0, g_th = 0;
  for (int n = -kImageCount; n <= kImageCount; ++n) {
    const double u = th - kTwoPi * n;
    const double w2 = r2 + u * u;
    const double inv = 1.0 / std::sqrt(w2);
    s += inv;
    if (want_gradient) {
      const double inv3 = inv / w2;
      g_rho -= rho * inv3;
      g_th -= u * inv3;
    }
  }
  const double c = kTwoPi * (kImageCount + 0.5);
  const double a = c - th;
  const double b = c + th;
  const double sa = std::sqrt(a * a + r2);
  const double sb = std::sqrt(b * b + r2);

  auto fp = [r2](double u) {
    const double w = std::sqrt(r2 + u * u);
    return -u / (w * w * w);
  };
  auto fppp = [r2](double u) {
    const double w2 = r2 + u * u;
    const double w = std::sqrt(w2);
    const double w5 = w2 * w2 * w;
    return 9 * u / w5 - 15 * u * u * u / (w5 * w2);
  };
  // F(t) = f(th - 2 pi t) + f(th + 2 pi t) at t = K + 1/2: arguments -a and b.
  const double F1 = kTwoPi * (-fp(-a) + fp(b));
  const double F3 = std::pow(kTwoPi, 3) * (-fppp(-a) + fppp(b));

  ImageTerms out{};
  out.value = 0.5 * s - (std::log(a + sa) + std::log(b + sb)) / (4 * kPi) + 0.5 * (F1 / 24.0 - 7.0 * F3 / 5760.0);
  if (want_gradient) {
    const double dlog_rho = rho / (sa * (a + sa)) + rho / (sb * (b + sb));
    const double dlog_th = -1.0 / sa + 1.0 / sb;
    auto fpp_rho = [r2](double u, double rr) {
      const double w2 = r2 + u * u;
      const double w = std::sqrt(w2);
      return 3 * u * rr / (w2 * w2 * w);
    };
    auto fpp = [r2](double u) {
      const double w2 = r2 + u * u;
      const double w = std::sqrt(w2);
      return -1.0 / (w2 * w) + 3 * u * u / (w2 * w2 * w);
    };
    const double dF1_rho = kTwoPi * (-fpp_rho(-a, rho) + fpp_rho(b, rho));
    const double dF1_th = kTwoPi * (-fpp(-a) + fpp(b));
    out.d_rho = 0.5 * g_rho - dlog_rho / (4 * kPi) + 0.5 * dF1_rho / 24.0;
    out.d_theta = 0.5 * g_th - dlog_th / (4 * kPi) + 0.5 * dF1_th / 24.0;
  }
  return out;
}

ImageTerms fourier_bessel(double rho, double th, bool want_gradient) {
  ImageTerms out{};
  out.value = std::log(1.0 / rho) / kTwoPi;
  out.d_rho = -1.0 / (kTwoPi * rho);
  out.d_theta = 0.0;
  // K0(32) < 1e-14 already; skip the Bessel calls entirely.
  if (rho > 32.0) return out;
  for (int k = 1;; ++k) {
    const double kr = k * rho;
    const double k0 = boost::math::cyl_bessel_k(0, kr);
    if (k0 < tol::kBessel) break;
    out.value += k0 * std::cos(k * th) / kPi;
    if (want_gradient) {
      const double k1 = boost::math::cyl_bessel_k(1, kr);
      out.d_rho -= k * k1 * std::cos(k * th) / kPi;
      out.d_theta -= k * k0 * std::sin(k * th) / kPi;
    }
  }
  return out;
}

// G minus its far-field part log(1/rho) / 2 pi; exactly zero once the
// Bessel terms drop below tolerance, so far-field sums decay cleanly.
ImageTerms bessel_part(double rho, double th, bool want_gradient) {
  ImageTerms t = rho >= 1.0 ? fourier_bessel(rho, th, want_gradient) : image_sum(rho, th, want_gradient);
  t.value -= std::log(1.0 / rho) / kTwoPi;
  t.d_rho += 1.0 / (kTwoPi * rho);
  return t;
}

void check_pole(double dist) {
  if (dist <= tol::kPoleProximity) {
    std::ostringstream os;
    os << "green: evaluation point within " << dist << " of the pole";
    throw DomainError(os.str());
  }
}

}  // namespace

double wrap_angle(double d) {
  double a = std::remainder(d, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

double q_distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x() - b.x()) * (a.x() - b.x()) + (a.y() - b.y()) * (a.y() - b.y()) +
                   std::pow(wrap_angle(a.z() - b.z()), 2));
}

double green_fourier_bessel(double rho, double dtheta) {
  if (!(rho > 0)) throw DomainError("green_fourier_bessel: rho must be positive");
  return fourier_bessel(rho, wrap_angle(dtheta), false).value;
}

double green_image_sum(double rho, double dtheta) {
  const double th = wrap_angle(dtheta);
  check_pole(std::hypot(rho, th));
  return image_sum(rho, th, false).value;
}

double green_single(const Vec3& pole, const Vec3& x) {
  const double rho = std::hypot(x.x() - pole.x(), x.y() - pole.y());
  const double th = wrap_angle(x.z() - pole.z());
  check_pole(std::hypot(rho, th));
  return rho >= 1.0 ? fourier_bessel(rho, th, false).value : image_sum(rho, th, false).value;
}

Vec3 green_single_gradient(const Vec3& pole, const Vec3& x) {
  const double dx = x.x() - pole.x();
  const double dy = x.y() - pole.y();
  const double rho = std::hypot(dx, dy);
  const double th = wrap_angle(x.z() - pole.z());
  check_pole(std::hypot(rho, th));
  const ImageTerms t = rho >= 1.0 ? fourier_bessel(rho, th, true) : image_sum(rho, th, true);
  // The planar gradient vanishes on the pole's axis by symmetry.
  if (rho == 0.0) return Vec3(0.0, 0.0, t.d_theta);
  return Vec3(t.d_rho * dx / rho, t.d_rho * dy / rho, t.d_theta);
}

std::complex<double> HoloSeries::operator()(std::complex<double> z) const {
  std::complex<double> s = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * z + *it;
  return s;
}

std::complex<double> HoloSeries::derivative(std::complex<double> z) const {
  std::complex<double> s = 0;
  for (std::size_t k = coeffs.size(); k-- > 1;) s = s * z + static_cast<double>(k) * coeffs[k];
  return s;
}

double NeckPotentialParams::lambda_tilde() const { return std::pow(lambda, static_cast<double>(nu) / b); }
double NeckPotentialParams::T() const { return nu / kPi * std::log(1.0 / lambda); }
double NeckPotentialParams::T_flat() const { return (2.0 * nu + 1.0) / kTwoPi * std::log(1.0 / lambda); }

Vec3 NeckPotentialParams::pole(int m) const {
  const Vec3& q = poles_rescaled.at(static_cast<std::size_t>(m));
  return Vec3(q.x() / lambda, q.y() / lambda, q.z());
}

double NeckPotentialParams::balancing_residual() const {
  double s = 0;
  for (const Vec3& q : poles_rescaled) s += std::log(1.0 / q_distance(q, Vec3::Zero()));
  return s + kTwoPi * h(0.0).imag() - kTwoPi * kappa0;
}

void NeckPotentialParams::validate() const {
  if (nu < 1) throw ConfigError("neck: nu must be a positive integer");
  if (b < 1 || b > 14) throw ConfigError("neck: b must lie in 1..14");
  if (!(lambda > 0)) throw ConfigError("neck: lambda must be positive");
  const int n = pole_count();
  if (static_cast<int>(poles_rescaled.size()) != n)
    throw ConfigError("neck: expected " + std::to_string(n) + " monopole points");
  for (int m = 0; m < n; ++m) {
    const Vec3 img = iota_base(poles_rescaled[static_cast<std::size_t>(m)]);
    if (q_distance(img, poles_rescaled[static_cast<std::size_t>(n - 1 - m)]) > 1e-12)
      throw ConfigError("neck: iota pairing violated at point " + std::to_string(m + 1));
  }
  const double res = balancing_residual();
  if (std::abs(res) > 1e-10) {
    std::ostringstream os;
    os << "neck: balancing residual " << res << " exceeds 1e-10";
    throw ConfigError(os.str());
  }
}

NeckPotentialParams NeckPotentialParams::with_lambda(double l) const {
  NeckPotentialParams q = *this;
  q.lambda = l;
  return q;
}

Vec3 iota_base(const Vec3& x) { return Vec3(-x.x(), -x.y(), -x.z()); }

NeckPotentialParams choose_monopole_points(int nu, int b, double kappa0, std::uint64_t seed, HoloSeries h,
                                           double lambda) {
  if (nu < 1 || nu > 4) throw ConfigError("choose_monopole_points: nu must lie in 1..4");
  if (b < 1 || b > 14) throw ConfigError("choose_monopole_points: b must lie in 1..14");
  NeckPotentialParams p;
  p.nu = nu;
  p.b = b;
  p.kappa0 = kappa0;
  p.lambda = lambda;
  p.seed = seed;
  p.h = std::move(h);
  const int n = p.pole_count();

  // Common radius: n log(1/rho) + 2 pi Im h(0) - 2 pi kappa0 is decreasing.
  const double im0 = p.h(0.0).imag();
  auto f = [&](double rho) { return n * std::log(1.0 / rho) + kTwoPi * im0 - kTwoPi * kappa0; };
  double lo = 1e-6, hi = 1e3;
  if (f(lo) * f(hi) > 0) {
    std::ostringstream os;
    os << "choose_monopole_points: no balancing radius in [1e-6, 1e3] for kappa0 = " << kappa0;
    throw ConfigError(os.str());
  }
  while (hi - lo > tol::kBisection * std::min(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0) lo = mid; else hi = mid;
  }
  p.rho0 = 0.5 * (lo + hi);

  std::mt19937_64 rng(seed);
  p.poles_rescaled.assign(static_cast<std::size_t>(n), Vec3::Zero());
  const double step = kTwoPi / n;
  for (int j = 0; j < n / 2; ++j) {
    double alpha = kPi / n + step * j;
    if (seed != 0) {
      const double u = uniform01(rng) - 0.5;
      alpha += 0.35 * step * u;
    }
    const Vec3 q(p.rho0 * std::cos(alpha), p.rho0 * std::sin(alpha), 0.0);
    p.poles_rescaled[static_cast<std::size_t>(j)] = q;
    p.poles_rescaled[static_cast<std::size_t>(n - 1 - j)] = iota_base(q);
  }
  p.validate();
  return p;
}

double pole_clearance(const NeckPotentialParams& p, const Vec3& x) {
  double d = std::numeric_limits<double>::infinity();
  for (int m = 0; m < p.pole_count(); ++m) d = std::min(d, q_distance(p.pole(m), x));
  return d;
}

double green_neck(const NeckPotentialParams& p, const Vec3& x) {
  const double r = std::hypot(x.x(), x.y());
  if (!(r > 0)) throw DomainError("green_neck: point on the axis r = 0");
  const double l = p.lambda;
  double g = (2.0 * p.nu + p.b) / kPi * std::log(1.0 / l) + p.nu / kPi * std::log(l * r);
  for (int m = 0; m < p.pole_count(); ++m) g += green_single(p.pole(m), x);
  const double a = p.lambda_tilde() * l;
  g += p.h(a * std::complex<double>(x.x(), x.y())).imag();
  return g;
}

Vec3 green_neck_gradient(const NeckPotentialParams& p, const Vec3& x) {
  const double r2 = x.x() * x.x() + x.y() * x.y();
  if (!(r2 > 0)) throw DomainError("green_neck_gradient: point on the axis r = 0");
  Vec3 g(p.nu / kPi * x.x() / r2, p.nu / kPi * x.y() / r2, 0.0);
  for (int m = 0; m < p.pole_count(); ++m) g += green_single_gradient(p.pole(m), x);
  // d Im H = Im H' dx + Re H' dy for H(zeta) = h(a zeta).
  const double a = p.lambda_tilde() * p.lambda;
  const std::complex<double> hp = a * p.h.derivative(a * std::complex<double>(x.x(), x.y()));
  g.x() += hp.imag();
  g.y() += hp.real();
  return g;
}

namespace {

// -(1/2 pi) sum_m log(1 - q_m / z) as F(z) with derivative, so that the
// far-field part of G_lambda - V_SF is Re F. Outside twice the pole ring the
// multipole series (1/2 pi) sum_k M_k / (k z^k) is used, with power sums
// M_k = sum q_m^k that cancel to rounding level set to zero: symmetric layouts
// then decay at their true rate instead of at the rounding floor.
struct FarField {
  double value;
  std::complex<double> derivative;
};

FarField far_field(const NeckPotentialParams& p, std::complex<double> z) {
  double rmax = 0;
  for (int m = 0; m < p.pole_count(); ++m) rmax = std::max(rmax, std::hypot(p.pole(m).x(), p.pole(m).y()));
  FarField out{0.0, 0.0};
  if (std::abs(z) < 2 * rmax) {
    std::complex<double> F = 0, dF = 0;
    for (int m = 0; m < p.pole_count(); ++m) {
      const std::complex<double> q(p.pole(m).x(), p.pole(m).y());
      F += std::log(1.0 - q / z);
      dF += q / (z * (z - q));
    }
    out.value = -F.real() / kTwoPi;
    out.derivative = -dF / kTwoPi;
    return out;
  }
  const double ratio = rmax / std::abs(z);
  std::complex<double> F = 0, dF = 0, zk = 1.0 / z;
  std::vector<std::complex<double>> qk(static_cast<std::size_t>(p.pole_count()), 1.0);
  // Truncate relative to the leading surviving moment, not absolutely, so the
  // tail keeps its shape arbitrarily far out.
  int first = 0;
  for (int k = 1; k <= 256 && !(first > 0 && std::pow(ratio, k - first) < 1e-17); ++k) {
    std::complex<double> M = 0;
    double scale = 0;
    for (std::size_t m = 0; m < qk.size(); ++m) {
      qk[m] *= std::complex<double>(p.pole(static_cast<int>(m)).x(), p.pole(static_cast<int>(m)).y());
      M += qk[m];
      scale += std::abs(qk[m]);
    }
    if (std::abs(M) > 1e-12 * scale) {
      if (first == 0) first = k;
      F += M * zk / static_cast<double>(k);
      dF -= M * zk / z;
    }
    zk /= z;
  }
  out.value = F.real() / kTwoPi;
  out.derivative = dF / kTwoPi;
  return out;
}

}  // namespace

double semiflat_gap(const NeckPotentialParams& p, const Vec3& x) {
  const std::complex<double> z(x.x(), x.y());
  if (!(std::abs(z) > 0)) throw DomainError("semiflat_gap: point on the axis r = 0");
  double s = far_field(p, z).value;
  for (int m = 0; m < p.pole_count(); ++m) {
    const Vec3 q = p.pole(m);
    const double rho = std::hypot(x.x() - q.x(), x.y() - q.y());
    const double th = wrap_angle(x.z() - q.z());
    check_pole(std::hypot(rho, th));
    s += bessel_part(rho, th, false).value;
  }
  return s;
}

Vec3 semiflat_gap_gradient(const NeckPotentialParams& p, const Vec3& x) {
  const std::complex<double> z(x.x(), x.y());
  if (!(std::abs(z) > 0)) throw DomainError("semiflat_gap_gradient: point on the axis r = 0");
  Vec3 g = Vec3::Zero();
  for (int m = 0; m < p.pole_count(); ++m) {
    const Vec3 q = p.pole(m);
    const double dx = x.x() - q.x(), dy = x.y() - q.y();
    const double rho = std::hypot(dx, dy);
    const double th = wrap_angle(x.z() - q.z());
    check_pole(std::hypot(rho, th));
    const ImageTerms t = bessel_part(rho, th, true);
    if (rho > 0) g += Vec3(t.d_rho * dx / rho, t.d_rho * dy / rho, t.d_theta);
    else g.z() += t.d_theta;
  }
  // For f = Re F: (f_x, f_y) = (Re F', -Im F').
  const std::complex<double> d = far_field(p, z).derivative;
  g.x() += d.real();
  g.y() -= d.imag();
  return g;
}

double deviation_near_origin(const NeckPotentialParams& p, const Vec3& x) {
  const double rt = p.lambda * std::hypot(x.x(), x.y());
  return green_neck(p, x) - (p.T() + p.kappa0 + p.nu / kPi * std::log(rt));
}

double deviation_near_infinity(const NeckPotentialParams& p, const Vec3& x) {
  const double rt = p.lambda * std::hypot(x.x(), x.y());
  const double a = p.lambda_tilde() * p.lambda;
  const double model = p.T() - p.b / kPi * std::log(rt) + p.h(a * std::complex<double>(x.x(), x.y())).imag();
  return green_neck(p, x) - model;
}

double deviation_near_pole(const NeckPotentialParams& p, const Vec3& x, int m) {
  const double dm = q_distance(p.poles_rescaled.at(static_cast<std::size_t>(m)), Vec3::Zero());
  return green_neck(p, x) - (green_single(p.pole(m), x) + p.T_flat() + p.nu / kPi * std::log(dm));
}

double deviation_bounded(const NeckPotentialParams& p, const Vec3& x) { return green_neck(p, x) - p.T(); }

double realized_iota0(const NeckPotentialParams& p) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  const int n = p.pole_count();
  for (int a = 0; a < n; ++a) {
    const Vec3& qa = p.poles_rescaled[static_cast<std::size_t>(a)];
    const double d0 = q_distance(qa, Vec3::Zero());
    lo = std::min(lo, d0);
    hi = std::max(hi, d0);
    for (int c = a + 1; c < n; ++c) {
      const double d = q_distance(qa, p.poles_rescaled[static_cast<std::size_t>(c)]);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return std::min(lo, 1.0 / hi);
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Origin: return "origin";
    case Regime::Infinity: return "infinity";
    case Regime::Pole: return "pole";
    case Regime::Bounded: return "bounded";
  }
  return "unknown";
}

RegimeReport asymptotic_regime_report(const NeckPotentialParams& p, const Vec3& x, double R0) {
  RegimeReport rep;
  rep.lambda = p.lambda;
  rep.x = x;
  const double l = p.lambda;
  const double rt = l * std::hypot(x.x(), x.y());
  const double iota0 = realized_iota0(p);

  int nearest = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (int m = 0; m < p.pole_count(); ++m) {
    const double d = l * q_distance(p.pole(m), x);
    if (d < dmin) {
      dmin = d;
      nearest = m;
    }
  }
  if (dmin <= iota0 / 4) {
    rep.regime = Regime::Pole;
    rep.pole_index = nearest;
    rep.predicted = 1.0;
    rep.observed = std::abs(deviation_near_pole(p, x, nearest));
  } else if (rt < 1.0 / R0) {
    rep.regime = Regime::Origin;
    rep.predicted = p.lambda_tilde() * rt;
    rep.observed = std::abs(deviation_near_origin(p, x));
  } else if (rt > R0) {
    rep.regime = Regime::Infinity;
    rep.predicted = l * l / (rt * rt);
    rep.observed = std::abs(deviation_near_infinity(p, x));
  } else {
    rep.regime = Regime::Bounded;
    rep.predicted = 1.0;
    rep.observed = std::abs(deviation_bounded(p, x));
  }
  return rep;
}

}  // namespace hkglue
