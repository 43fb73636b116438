#include "hkglue/scales.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hkglue/constants.hpp"
#include "hkglue/parallel.hpp"
#include "hkglue/random.hpp"

namespace hkglue {

namespace {

double lerp(double a, double b, double s) { return s <= 0 ? a : (s >= 1 ? b : a + (b - a) * s); }

// Position inside the band [lo, hi] on a log scale; <= 0 below, >= 1 above.
double band(double v, double lo, double hi) { return std::log(v / lo) / std::log(hi / lo); }

double im_h0(const ScaleParams& p) { return p.neck.h.coeffs.empty() ? 0.0 : p.neck.h.coeffs.front().imag(); }

double r_tilde(const Vec3& x, const ScaleParams& p) { return p.lambda() * std::hypot(x[0], x[1]); }

double model_piece(double rt, const ScaleParams& p) {
  return p.T() + p.neck.kappa0 + p.neck.nu / kPi * std::log(rt);
}

double flat_piece(double rt, const ScaleParams& p) { return p.T() + im_h0(p) - p.neck.b / kPi * std::log(rt); }

// max(G_lambda, 1); infinite on a pole.
double path_potential(const Vec3& z, const ScaleParams& p) {
  try {
    return std::max(green_neck(p.neck, z), 1.0);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

double smoothstep5(double u) {
  if (!(u > 0)) return 0.0;
  if (u >= 1) return 1.0;
  return u * u * u * (10 - 15 * u + 6 * u * u);
}

void ScaleParams::validate() const {
  std::ostringstream os;
  const double l = lambda();
  if (!(l > 0 && l < 1)) os << "lambda must lie in (0, 1); ";
  if (!(R0 > 0)) os << "R0 must be positive; ";
  if (!(iota0 > 0 && iota0 <= 1)) os << "iota0 must lie in (0, 1]; ";
  if (!(r_lambda > 0)) os << "r_lambda must be positive; ";
  if (neck.poles_rescaled.empty()) os << "pole set is empty; ";
  if (os.tellp() == 0) {
    if (!(2 * l * R0 < iota0 / 4)) os << "need 2 lambda R0 < iota0/4; ";
    if (!(2 / iota0 < r_lambda)) os << "need 2/iota0 < r_lambda; ";
    if (!(model_piece(2 * l * R0, *this) > 0)) os << "T + kappa0 + (nu/pi) log r~ <= 0 at 2 lambda R0; ";
    if (!(flat_piece(r_lambda, *this) > 0)) os << "T + Im h(0) - (b/pi) log r~ <= 0 at r_lambda; ";
  }
  if (os.tellp() != 0) throw ConfigError("ScaleParams: " + os.str());
}

ScaleParams make_scale_params(const GluingGeometry& g, double R0) {
  ScaleParams p;
  p.neck = g.neck;
  p.R0 = R0;
  p.iota0 = realized_iota0(g.neck);
  p.r_lambda = g.r_lambda;
  p.validate();
  return p;
}

double scale_r(const Vec3& x, const ScaleParams& p) {
  const double rt = r_tilde(x, p), a = p.lambda() * p.R0;
  if (rt <= a) return a;
  const double inner = lerp(a, rt, smoothstep5(band(rt, a, 2 * a)));
  return lerp(inner, 2 * p.r_lambda, smoothstep5(band(rt, p.r_lambda, 2 * p.r_lambda)));
}

double scale_d(const Vec3& x, const ScaleParams& p) {
  const double d = pole_clearance(p.neck, x), tf = p.T_flat();
  const double core = 1.0 / std::sqrt(tf);
  if (d <= 1.0 / tf) return core;
  const double inner = lerp(core, std::sqrt(tf) * d, smoothstep5(band(d, 1.0 / tf, 2.0 / tf)));
  if (d <= 1.0) return inner;
  const double outer = std::sqrt(tf + std::log(1.0 / d) / kTwoPi) * d;
  return lerp(inner, outer, smoothstep5(band(d, 1.0, 2.0)));
}

double scale_LT(const Vec3& x, const ScaleParams& p) {
  const double rt = r_tilde(x, p), a = p.lambda() * p.R0;
  if (rt <= a) return 1.0;
  const double in = lerp(1.0, model_piece(rt, p), smoothstep5(band(rt, a, 2 * a)));
  const double ring = lerp(in, flat_piece(rt, p), smoothstep5(band(rt, p.iota0 / 4, 2 / p.iota0)));
  return lerp(ring, 1.0, smoothstep5(band(rt, p.r_lambda, 2 * p.r_lambda)));
}

double scale_s(const Vec3& x, const ScaleParams& p) {
  const double dt = p.lambda() * pole_clearance(p.neck, x);
  const double u = smoothstep5(band(dt, p.iota0 / 4, 2 * p.iota0));
  const double lt = p.lambda_tilde();
  const double near = u < 1 ? lt * p.lambda() * scale_d(x, p) : 0.0;
  const double far = u > 0 ? lt * std::sqrt(scale_LT(x, p)) * scale_r(x, p) : 0.0;
  return lerp(near, far, u);
}

std::string weight_region_name(WeightRegion r) {
  switch (r) {
    case WeightRegion::Sb: return "Sb";
    case WeightRegion::Regular: return "regular";
    case WeightRegion::I1: return "I1";
  }
  return "?";
}

double weight_interface(const ScaleParams& p) { return 4 * p.r_lambda; }

double weight_rho(const Vec3& x, WeightRegion region, const ScaleParams& p) {
  switch (region) {
    case WeightRegion::Regular: return 1.0;
    case WeightRegion::I1: throw UnsupportedRegionError("weight_rho: I1 regions are not supported");
    case WeightRegion::Sb: break;
  }
  const double rt = r_tilde(x, p);
  const double u = smoothstep5(band(rt, 2 * p.r_lambda, weight_interface(p)));
  return lerp(scale_s(x, p), 1.0, u);
}

double weighted_c0_norm(const std::function<double(const ScalePoint&)>& field, double mu,
                        const std::vector<ScalePoint>& samples, const ScaleParams& p) {
  if (samples.empty()) throw PreconditionError("weighted_c0_norm: empty sample set");
  const std::vector<double> v = parallel_map(samples.size(), [&](std::size_t k) {
    const ScalePoint& s = samples[k];
    return std::pow(weight_rho(s.x, s.region, p), -mu) * std::abs(field(s));
  });
  return *std::max_element(v.begin(), v.end());
}

double path_distance(const Vec3& x, const Vec3& y, const ScaleParams& p, int steps) {
  if (steps < 1) throw PreconditionError("path_distance: steps must be positive");
  const Vec3 dx = (y - x) / steps;
  double len = 0.0;
  for (int k = 0; k < steps; ++k) len += std::sqrt(path_potential(x + (k + 0.5) * dx, p));
  return p.lambda_tilde() * p.lambda() * len * dx.norm();
}

ComparabilityReport comparability(const ScaleParams& p, int n_x, int n_y, std::uint64_t seed) {
  if (n_x < 1 || n_y < 1) throw PreconditionError("comparability: sample counts must be positive");
  p.validate();
  struct Draw {
    Vec3 x;
    std::vector<Vec3> dir;
    std::vector<double> frac;
  };
  // All randomness is drawn up front so the parallel part is deterministic.
  Rng rng(seed);
  const double l = p.lambda(), tf = p.T_flat();
  const int np = p.neck.pole_count();
  std::vector<Draw> draws;
  auto unit = [&rng] {
    Vec3 v;
    do v = Vec3(standard_normal(rng), standard_normal(rng), standard_normal(rng));
    while (v.norm() == 0.0);
    return Vec3(v / v.norm());
  };
  while (static_cast<int>(draws.size()) < n_x) {
    Draw d;
    if (draws.size() % 4 == 0) {
      const int m = std::min(np - 1, static_cast<int>(np * uniform01(rng)));
      const double dist = std::exp(uniform(rng, std::log(0.1 / tf), std::log(p.iota0 / (2 * l))));
      d.x = p.neck.pole(m) + dist * unit();
    } else {
      const double rt = std::exp(uniform(rng, std::log(l * p.R0 / 2), std::log(4 * p.r_lambda)));
      const double a = uniform(rng, 0.0, kTwoPi);
      d.x = Vec3(rt / l * std::cos(a), rt / l * std::sin(a), uniform(rng, -kPi, kPi));
    }
    for (int j = 0; j < n_y; ++j) {
      d.dir.push_back(unit());
      d.frac.push_back(uniform01(rng));
    }
    if (pole_clearance(p.neck, d.x) > 1e-6) draws.push_back(std::move(d));
  }

  const double unit_len = p.lambda_tilde() * l;
  const auto per_x = parallel_map(draws.size(), [&](std::size_t i) {
    const Draw& d = draws[i];
    const double sx = scale_s(d.x, p);
    ComparabilityReport r;
    r.pairs = 0;
    for (std::size_t j = 0; j < d.dir.size(); ++j) {
      const double target = d.frac[j] * sx / 4;
      // March along the ray until the surrogate length reaches the target.
      const double step = target / (unit_len * std::sqrt(path_potential(d.x, p))) / 32;
      Vec3 y = d.x;
      double len = 0.0;
      for (int k = 0; k < 4096 && len < target; ++k) {
        const double inc = unit_len * std::sqrt(path_potential(y + 0.5 * step * d.dir[j], p)) * step;
        if (!std::isfinite(inc) || len + inc > target) break;
        len += inc;
        y += step * d.dir[j];
      }
      if (len <= 0.0) continue;
      const double sy = scale_s(y, p);
      r.C0 = std::max({r.C0, sy / sx, sx / sy});
      r.lipschitz = std::max(r.lipschitz, std::abs(sy - sx) / len);
      ++r.pairs;
    }
    return r;
  });
  ComparabilityReport out;
  out.pairs = 0;
  for (const auto& r : per_x) {
    out.C0 = std::max(out.C0, r.C0);
    out.lipschitz = std::max(out.lipschitz, r.lipschitz);
    out.pairs += r.pairs;
  }
  return out;
}

std::vector<ScaleProfileRow> scale_profile(const ScaleParams& p, int n) {
  if (n < 2) throw PreconditionError("scale_profile: need at least 2 samples per ray");
  p.validate();
  const Vec3& q = p.neck.poles_rescaled.front();
  const double a0 = std::atan2(q[1], q[0]);
  const double l = p.lambda();
  const double lo = std::log(l * p.R0 / 2), hi = std::log(4 * p.r_lambda);
  std::vector<ScaleProfileRow> rows;
  for (const auto& [name, angle] : {std::pair<const char*, double>{"pole", a0},
                                    std::pair<const char*, double>{"gap", a0 + kPi / p.neck.pole_count()}}) {
    for (int k = 0; k < n; ++k) {
      const double rt = std::exp(lo + (hi - lo) * k / (n - 1));
      const Vec3 x(rt / l * std::cos(angle), rt / l * std::sin(angle), 0.0);
      rows.push_back({name, rt, scale_s(x, p), scale_d(x, p), scale_LT(x, p), weight_rho(x, WeightRegion::Sb, p)});
    }
  }
  return rows;
}

void write_scale_profile_csv(std::ostream& os, const std::vector<ScaleProfileRow>& rows) {
  os << "ray,r_tilde,s,d,LT,rho\n";
  os << std::setprecision(12);
  for (const auto& r : rows) os << r.ray << ',' << r.r_tilde << ',' << r.s << ',' << r.d << ',' << r.LT << ',' << r.rho << '\n';
}

}  // namespace hkglue
