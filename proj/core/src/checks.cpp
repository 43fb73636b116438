#include "hkglue/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "hkglue/donaldson.hpp"
#include "hkglue/gibbons_hawking.hpp"
#include "hkglue/gluing.hpp"
#include "hkglue/greens.hpp"
#include "hkglue/parallel.hpp"
#include "hkglue/random.hpp"
#include "hkglue/regression.hpp"
#include "hkglue/topology.hpp"

namespace hkglue {

namespace {

using Clock = std::chrono::steady_clock;

// The only timing-dependent failure; serialize() leaves it out.
const char* const kOverBudget = "runtime over budget";

// Collects metrics and failed conditions for one check.
class Recorder {
 public:
  Recorder(int id, std::string title, const CheckTolerances& t) : t0_(Clock::now()), budget_(t.budget[id - 1]) {
    r_.id = id;
    r_.title = std::move(title);
  }
  void metric(const std::string& key, double v) { r_.metrics.push_back({key, v}); }
  // Records v and fails unless ok.
  void require(const std::string& key, double v, bool ok, const std::string& what) {
    metric(key, v);
    if (!ok) r_.failures.push_back(what);
  }
  CheckResult finish() {
    r_.seconds = std::chrono::duration<double>(Clock::now() - t0_).count();
    if (r_.seconds > budget_) r_.failures.push_back(kOverBudget);
    r_.pass = r_.failures.empty();
    return r_;
  }

 private:
  CheckResult r_;
  Clock::time_point t0_;
  double budget_;
};

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ChartPoint cart(const Vec3& b, double t3) { return make_point(ChartId::Cartesian4, {b.x(), b.y(), b.z(), t3}); }

double triple_gap(const HKSample& a, const HKSample& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < 3; ++i) d = std::max(d, (a.omega[i] - b.omega[i]).max_abs());
  return d;
}

// Random point on the ALG* end: |x| log-uniform in [lo, hi].
Vec3 annulus_point(Rng& g, double lo, double hi) {
  const double r = std::exp(uniform(g, std::log(lo), std::log(hi))), a = uniform(g, 0.0, kTwoPi);
  return Vec3(r * std::cos(a), r * std::sin(a), uniform(g, -kPi, kPi));
}

// Neck sample points with the connection chart picked per point; V > 0.1
// and clear of the poles.
struct NeckSample {
  Vec3 x;
  double t3;
};

std::vector<NeckSample> neck_points(const HarmonicPotential& V, Rng& g, int n) {
  std::vector<NeckSample> out;
  while (static_cast<int>(out.size()) < n) {
    const Vec3 x = annulus_point(g, 0.5, 40.0);
    const double t3 = uniform(g, -kPi, kPi);
    if (V.clearance(x) < 0.2 || V.value(x) <= 0.1) continue;
    out.push_back({x, t3});
  }
  return out;
}

NeckPotentialParams check_neck() {
  HoloSeries h;
  h.coeffs = {{0.0, 1.0}, {0.25, 0.0}};
  return choose_monopole_points(1, 1, 1.0, 0, h, 0.1);
}

template <class F>
double max_over(std::size_t n, const F& f) {
  const auto v = parallel_map(n, f);
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

template <class F>
double min_over(std::size_t n, const F& f) {
  const auto v = parallel_map(n, f);
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

// Exponent of the class bound on a ladder.
double class_slope(const std::vector<GluingParams>& ladder, const std::string& key, const ZoneMeasureOptions& o) {
  std::vector<double> xs, ys;
  for (const auto& p : ladder) {
    xs.push_back(p.lambda);
    for (const auto& [k, v] : class_bounds(p, o))
      if (k == key) ys.push_back(v);
  }
  if (ys.size() != xs.size()) throw StructuralError("class_slope: missing key " + key);
  return fit_loglog(xs, ys).slope;
}

}  // namespace

std::vector<std::string> tolerance_names() {
  std::vector<std::string> names{"q_identity", "selfdual", "closed", "nonharmonic_floor", "iota_invariance",
                                 "decay_slope_max", "exponent_pure", "exponent_log", "flux", "balancing",
                                 "outer_slope_min", "roundtrip", "norm_ratio_max", "scalar_oracle",
                                 "comparability_max"};
  for (int k = 1; k <= 8; ++k) names.push_back("budget" + std::to_string(k));
  return names;
}

void set_tolerance(CheckTolerances& t, const std::string& name, double value) {
  const std::map<std::string, double*> fields{
      {"q_identity", &t.q_identity},     {"selfdual", &t.selfdual},
      {"closed", &t.closed},             {"nonharmonic_floor", &t.nonharmonic_floor},
      {"iota_invariance", &t.iota_invariance}, {"decay_slope_max", &t.decay_slope_max},
      {"exponent_pure", &t.exponent_pure}, {"exponent_log", &t.exponent_log},
      {"flux", &t.flux},                 {"balancing", &t.balancing},
      {"outer_slope_min", &t.outer_slope_min}, {"roundtrip", &t.roundtrip},
      {"norm_ratio_max", &t.norm_ratio_max}, {"scalar_oracle", &t.scalar_oracle},
      {"comparability_max", &t.comparability_max}};
  if (name.rfind("budget", 0) == 0 && name.size() == 7 && name[6] >= '1' && name[6] <= '8') {
    if (!(value > 0)) throw ConfigError("tolerance " + name + " must be positive");
    t.budget[name[6] - '1'] = value;
    return;
  }
  const auto it = fields.find(name);
  if (it == fields.end()) throw ConfigError("unknown tolerance '" + name + "'");
  if (name != "decay_slope_max" && !(value > 0)) throw ConfigError("tolerance " + name + " must be positive");
  *it->second = value;
}

double CheckResult::metric(const std::string& key) const {
  for (const auto& m : metrics)
    if (m.key == key) return m.value;
  throw StructuralError("CheckResult: no metric " + key);
}

ModelResiduals model_residuals(const ModelConfig& cfg, std::uint64_t seed, int samples, bool inject_nonharmonic) {
  if (samples < 1) throw PreconditionError("model_residuals: samples must be positive");
  Rng g(seed);
  ModelResiduals out;
  out.samples = samples;
  const double h = tol::kFdStepClosed;
  if (inject_nonharmonic) {
    // V = r with the model connection: pointwise algebra holds, d w does not.
    const HKTripleField t = build_gh_triple(nonharmonic_control(), model_connection(1));
    std::vector<ChartPoint> pts;
    for (int i = 0; i < samples; ++i) pts.push_back(cart(annulus_point(g, 1.0, 5.0), uniform(g, -kPi, kPi)));
    out.q_residual_max = max_over(pts.size(), [&](std::size_t i) { return q_error(q_matrix(t, pts[i])); });
    out.selfdual_residual_max = max_over(pts.size(), [&](std::size_t i) { return selfdual_residual(t, pts[i]); });
    out.closedness_residual_max = max_over(pts.size(), [&](std::size_t i) { return closedness_residual(t, pts[i], h); });
    return out;
  }
  if (const auto* a = std::get_if<ALGParams>(&cfg)) {
    a->validate();
    const HKTripleField t = alg_model_triple(*a);
    const HKTripleField u = pullback_triple(t, alg_sector_map(*a));
    std::vector<ChartPoint> pts;
    for (int i = 0; i < samples; ++i) {
      const double r = std::exp(uniform(g, std::log(1.5 * a->R), std::log(50.0 * a->R)));
      const double ang = uniform(g, 0.0, kTwoPi * a->beta);
      pts.push_back(make_point(ChartId::Alg4, {r * std::cos(ang), r * std::sin(ang), uniform(g, -3.0, 3.0),
                                               uniform(g, -3.0, 3.0)}));
    }
    out.q_residual_max = max_over(pts.size(), [&](std::size_t i) { return q_error(q_matrix(t, pts[i])); });
    out.selfdual_residual_max = max_over(pts.size(), [&](std::size_t i) { return selfdual_residual(t, pts[i]); });
    out.closedness_residual_max = max_over(pts.size(), [&](std::size_t i) { return closedness_residual(t, pts[i], h); });
    out.iota_invariance_residual =
        max_over(pts.size(), [&](std::size_t i) { return triple_gap(t.sample(pts[i]), u.sample(pts[i])); });
    return out;
  }
  const auto& s = std::get<ALGStarParams>(cfg);
  s.validate();
  const HKTripleField t = algstar_model_triple(s);
  const HKTripleField tp = algstar_model_triple_polar(s);
  const HKTripleField u = pullback_triple(tp, involution_iota());
  std::vector<ChartPoint> pts, polar;
  for (int i = 0; i < samples; ++i) {
    const Vec3 x = annulus_point(g, 1.5 * s.R, 20.0 * s.R);
    const double t3 = uniform(g, -kPi, kPi);
    pts.push_back(cart(x, t3));
    polar.push_back(make_point(ChartId::Polar4, {std::hypot(x.x(), x.y()), std::atan2(x.y(), x.x()) + kPi, x.z(), t3}));
  }
  out.q_residual_max = max_over(pts.size(), [&](std::size_t i) { return q_error(q_matrix(t, pts[i])); });
  out.selfdual_residual_max = max_over(pts.size(), [&](std::size_t i) { return selfdual_residual(t, pts[i]); });
  out.closedness_residual_max = max_over(pts.size(), [&](std::size_t i) { return closedness_residual(t, pts[i], h); });
  out.iota_invariance_residual =
      max_over(polar.size(), [&](std::size_t i) { return triple_gap(tp.sample(polar[i]), u.sample(polar[i])); });
  return out;
}

CheckResult check_hk_algebra(std::uint64_t seed, const CheckTolerances& t, int samples) {
  Recorder rec(1, "hyperkahler algebra", t);
  Rng g(seed);
  // ALG: cycle through the table rows.
  const auto& table = alg_table();
  double q_alg = 0, sd_alg = 0;
  {
    std::vector<std::pair<HKTripleField, ChartPoint>> work;
    for (int i = 0; i < samples; ++i) {
      const auto& row = table[i % table.size()];
      const ALGParams p = make_alg_params(row.tag, 1.5, 1.0, row.tau.value_or(std::complex<double>(0.2, 1.1)));
      const double r = std::exp(uniform(g, std::log(1.5), std::log(50.0))), a = uniform(g, 0.0, kTwoPi * p.beta);
      work.emplace_back(alg_model_triple(p), make_point(ChartId::Alg4, {r * std::cos(a), r * std::sin(a),
                                                                        uniform(g, -3.0, 3.0), uniform(g, -3.0, 3.0)}));
    }
    q_alg = max_over(work.size(), [&](std::size_t i) { return q_error(q_matrix(work[i].first, work[i].second)); });
    sd_alg = max_over(work.size(), [&](std::size_t i) { return selfdual_residual(work[i].first, work[i].second); });
  }
  // ALG*: nu = 1..4, kappa0 in {1, 1.5}.
  double q_star = 0, sd_star = 0;
  {
    std::vector<HKTripleField> tri;
    for (int nu = 1; nu <= 4; ++nu)
      for (double k0 : {1.0, 1.5}) tri.push_back(algstar_model_triple(ALGStarParams{nu, k0, 1.0, 2.0}));
    std::vector<ChartPoint> pts;
    for (int i = 0; i < samples; ++i) pts.push_back(cart(annulus_point(g, 3.0, 80.0), uniform(g, -kPi, kPi)));
    q_star = max_over(pts.size(), [&](std::size_t i) { return q_error(q_matrix(tri[i % tri.size()], pts[i])); });
    sd_star = max_over(pts.size(), [&](std::size_t i) { return selfdual_residual(tri[i % tri.size()], pts[i]); });
  }
  // Neck.
  double q_neck = 0, sd_neck = 0;
  {
    const NeckPotentialParams p = check_neck();
    const HarmonicPotential V = neck_potential(p);
    const HKTripleField tri = neck_triple(p);
    const auto pts = neck_points(V, g, samples);
    q_neck = max_over(pts.size(), [&](std::size_t i) { return q_error(q_matrix(tri, cart(pts[i].x, pts[i].t3))); });
    sd_neck = max_over(pts.size(), [&](std::size_t i) { return selfdual_residual(tri, cart(pts[i].x, pts[i].t3)); });
  }
  rec.metric("samples_per_family", samples);
  rec.require("q_residual_alg", q_alg, q_alg < t.q_identity, "ALG |Q - Id|");
  rec.require("q_residual_algstar", q_star, q_star < t.q_identity, "ALG* |Q - Id|");
  rec.require("q_residual_neck", q_neck, q_neck < t.q_identity, "neck |Q - Id|");
  rec.require("selfdual_residual_alg", sd_alg, sd_alg < t.selfdual, "ALG self-duality");
  rec.require("selfdual_residual_algstar", sd_star, sd_star < t.selfdual, "ALG* self-duality");
  rec.require("selfdual_residual_neck", sd_neck, sd_neck < t.selfdual, "neck self-duality");
  return rec.finish();
}

CheckResult check_closedness(std::uint64_t seed, const CheckTolerances& t, int samples) {
  Recorder rec(2, "closedness and harmonicity", t);
  Rng g(seed ^ 0x2);
  const double h = tol::kFdStepClosed;
  double harmonic = 0.0;
  for (int nu = 1; nu <= 4; ++nu) {
    const HKTripleField tri = algstar_model_triple(ALGStarParams{nu, 1.0, 1.0, 2.0});
    std::vector<ChartPoint> pts;
    for (int i = 0; i < samples / 4 + 1; ++i) pts.push_back(cart(annulus_point(g, 3.0, 40.0), uniform(g, -kPi, kPi)));
    harmonic = std::max(harmonic, max_over(pts.size(), [&](std::size_t i) { return closedness_residual(tri, pts[i], h); }));
  }
  const NeckPotentialParams p = check_neck();
  const HarmonicPotential V = neck_potential(p);
  const auto pts = neck_points(V, g, samples);
  const double neck = max_over(pts.size(), [&](std::size_t i) {
    const HKTripleField tri = build_gh_triple(V, neck_connection_for(p, pts[i].x));
    return closedness_residual(tri, cart(pts[i].x, pts[i].t3), h);
  });
  const HKTripleField bad = build_gh_triple(nonharmonic_control(), model_connection(1));
  std::vector<ChartPoint> bp;
  for (int i = 0; i < samples; ++i) bp.push_back(cart(annulus_point(g, 1.0, 5.0), uniform(g, -kPi, kPi)));
  const double control = min_over(bp.size(), [&](std::size_t i) { return closedness_residual(bad, bp[i], h); });
  rec.require("closedness_algstar_max", harmonic, harmonic < t.closed, "ALG* model not closed");
  rec.require("closedness_neck_max", neck, neck < t.closed, "neck triple not closed");
  rec.require("closedness_control_min", control, control > t.nonharmonic_floor, "control not detected");
  return rec.finish();
}

CheckResult check_green_asymptotics(const CheckTolerances& t) {
  Recorder rec(3, "Green's function asymptotics", t);
  // Single pole: G - log(1/d)/2pi decays like e^{-d}. fit_loglog on e^d
  // gives the slope of log|dev| against d.
  {
    std::vector<double> ed, dev;
    for (double d = 3.0; d <= 8.0; d += 0.5) {
      ed.push_back(std::exp(d));
      dev.push_back(std::abs(green_single(Vec3::Zero(), Vec3(d, 0, 0)) - std::log(1.0 / d) / kTwoPi));
    }
    const double s = fit_loglog(ed, dev).slope;
    rec.require("decay_slope", s, s <= t.decay_slope_max, "single-pole decay too slow");
  }
  // Near the origin: slope 1 in r~, amplitude proportional to lambda~.
  {
    HoloSeries h;
    h.coeffs = {{0.0, 0.0}, {1.0, 0.0}};
    std::vector<double> tl, amp;
    double worst = 0.0, slope_first = 0.0;
    for (double lambda : {1e-2, 1e-3}) {
      const auto p = choose_monopole_points(1, 1, 0.0, 0, h, lambda);
      std::vector<double> rt, dev;
      for (double r : {1e-3, 2e-3, 4e-3, 7e-3, 1e-2}) {
        rt.push_back(r);
        dev.push_back(std::abs(deviation_near_origin(p, Vec3(r / lambda * std::cos(0.4), r / lambda * std::sin(0.4), 0.3))));
      }
      const LogLogFit f = fit_loglog(rt, dev);
      if (tl.empty()) slope_first = f.slope;
      worst = std::max(worst, std::abs(f.slope - 1.0));
      tl.push_back(p.lambda_tilde());
      amp.push_back(std::exp(f.intercept));
    }
    const double as = fit_loglog(tl, amp).slope;
    rec.require("origin_slope", slope_first, worst <= t.exponent_pure, "origin slope off 1");
    rec.require("origin_amplitude_slope", as, std::abs(as - 1.0) <= t.exponent_pure, "origin amplitude not ~ lambda~");
  }
  // Near infinity: sup over the circle, slope -2.
  {
    const auto p = choose_monopole_points(1, 1, 0.0, 5, {}, 0.01);
    std::vector<double> rt, dev;
    for (double r : {5.0, 8.0, 12.0, 18.0, 25.0}) {
      double w = 0.0;
      for (int k = 0; k < 64; ++k) {
        const double a = kTwoPi * k / 64;
        w = std::max(w, std::abs(deviation_near_infinity(p, Vec3(r / p.lambda * std::cos(a), r / p.lambda * std::sin(a), 0.0))));
      }
      rt.push_back(r);
      dev.push_back(w);
    }
    const double s = fit_loglog(rt, dev).slope;
    rec.require("infinity_slope", s, std::abs(s + 2.0) <= t.exponent_pure, "infinity slope off -2");
  }
  // Pole and bounded regimes: sup deviation flat in lambda.
  {
    std::vector<double> ls, pole_sup, bounded_sup;
    for (double lambda : {1e-2, 1e-3, 1e-4}) {
      const auto p = choose_monopole_points(1, 1, 0.0, 0, {}, lambda);
      double wp = 0.0, wb = 0.0;
      for (double d : {0.05, 0.3, 1.0}) wp = std::max(wp, std::abs(deviation_near_pole(p, p.pole(0) + Vec3(d, 0.0, 0.1), 0)));
      for (double rt : {0.6, 1.5}) {
        const Vec3 x(rt / lambda * std::cos(0.1), rt / lambda * std::sin(0.1), 0.5);
        if (pole_clearance(p, x) * lambda >= 0.25) wb = std::max(wb, std::abs(deviation_bounded(p, x)));
      }
      ls.push_back(lambda);
      pole_sup.push_back(wp);
      bounded_sup.push_back(wb);
    }
    const double sp = fit_loglog(ls, pole_sup).slope, sb = fit_loglog(ls, bounded_sup).slope;
    rec.require("pole_lambda_slope", sp, std::abs(sp) <= t.exponent_pure, "pole deviation not uniform in lambda");
    rec.require("bounded_lambda_slope", sb, std::abs(sb) <= t.exponent_pure, "bounded deviation not uniform in lambda");
  }
  return rec.finish();
}

CheckResult check_flux(const CheckTolerances& t) {
  Recorder rec(4, "flux quantization", t);
  double model = 0.0;
  for (int nu = 1; nu <= 4; ++nu)
    for (double c : {0.5, 1.0, 7.0})
      model = std::max(model, std::abs(monopole_flux(model_potential(nu, 0.0), c) - 4.0 * kPi * nu));
  rec.require("model_flux_error", model, model <= t.flux, "model flux 4 pi nu");
  const auto p = choose_monopole_points(1, 1, 0.0, 0, {}, 0.5);
  const HarmonicPotential V = neck_potential(p);
  const double inside = monopole_flux(V, 1.0), outside = monopole_flux(V, 3.0);
  const double e_in = std::abs(inside - 4.0 * kPi * p.nu), e_out = std::abs(outside + 4.0 * kPi * p.b);
  const double e_jump = std::abs(outside - inside + kTwoPi * p.pole_count());
  rec.require("interior_flux_error", e_in, e_in <= t.flux, "interior flux 4 pi nu");
  rec.require("exterior_flux_error", e_out, e_out <= t.flux, "exterior flux -4 pi b");
  rec.require("nested_jump_error", e_jump, e_jump <= t.flux, "jump -2 pi per enclosed pole");
  const HarmonicPotential G = single_pole_potential(Vec3(2.0, 0.0, 0.3));
  const double e_single = std::abs(monopole_flux(G, 2.5) - monopole_flux(G, 1.5) + kTwoPi);
  rec.require("single_pole_jump_error", e_single, e_single <= t.flux, "single pole jump -2 pi");
  return rec.finish();
}

CheckResult check_balancing(const CheckTolerances& t) {
  Recorder rec(5, "balancing radius", t);
  double worst = 0.0, resid = 0.0;
  for (double k0 : {0.0, 0.5, 1.0, 2.0}) {
    const auto p = choose_monopole_points(1, 1, k0, 0);
    worst = std::max(worst, std::abs(p.rho0 - std::exp(-kPi * k0 / 2)));
    resid = std::max(resid, std::abs(p.balancing_residual()));
  }
  rec.require("rho0_error", worst, worst <= t.balancing, "rho0 != exp(-pi kappa0 / 2)");
  rec.require("balancing_residual", resid, resid <= t.balancing, "balancing residual");
  return rec.finish();
}

CheckResult check_gluing_scaling(const CheckTolerances& t, int n) {
  Recorder rec(6, "gluing error scaling", t);
  {
    ZoneMeasureOptions o;
    o.outer = false;
    o.divide_logs = true;
    o.n = n;
    std::vector<GluingParams> ladder;
    for (double tt : {0.2, 0.1, 0.05}) ladder.push_back(default_gluing_params(tt * tt * tt, tt));
    const ScanResult r = error_scan(ladder, [&](const GluingParams& p) { return standard_zone_measure(p, o); });
    const double got = r.fit("inner", "Q").slope, want = class_slope(ladder, "inner/Q", o);
    rec.metric("inner_q_class_slope", want);
    rec.require("inner_q_slope", got, std::abs(got - want) <= t.exponent_log, "inner Q exponent off its class");
  }
  {
    ZoneMeasureOptions o;
    o.inner = false;
    o.n = n;
    std::vector<GluingParams> ladder;
    for (double l : {1e-1, 3e-2, 1e-2}) ladder.push_back(default_gluing_params(l, 0.2));
    const ScanResult r = error_scan(ladder, [&](const GluingParams& p) { return standard_zone_measure(p, o); });
    const double got = r.fit("outer", "Q").slope;
    rec.require("outer_q_slope", got, got >= t.outer_slope_min, "outer Q exponent below bound");
  }
  return rec.finish();
}

CheckResult check_donaldson(std::uint64_t seed, const CheckTolerances& t) {
  Recorder rec(7, "Donaldson core", t);
  const DonaldsonSelfTest s = donaldson_selftest(seed, 1000, 100);
  rec.metric("trials", s.trials);
  rec.metric("ift_trials", s.ift_trials);
  rec.require("max_roundtrip_residual", s.max_roundtrip_residual, s.max_roundtrip_residual < t.roundtrip,
              "round trip residual");
  rec.require("max_norm_ratio", s.max_norm_ratio, s.max_norm_ratio <= t.norm_ratio_max, "|x| > 2 C_L |F(0)|");
  rec.require("scalar_error", s.scalar_error, s.scalar_error <= t.scalar_oracle, "scalar oracle mismatch");
  return rec.finish();
}

CheckResult check_topology(const CheckTolerances& t) {
  Recorder rec(8, "topology", t);
  // Table of b2 per fiber tag.
  const std::map<std::string, int> table{{"I0*", 5}, {"II", 9}, {"II*", 1}, {"III", 8},
                                         {"III*", 2}, {"IV", 7}, {"IV*", 3}};
  int b2_mismatch = 0, indefinite = 0;
  for (FiberTag tag : all_fiber_tags()) {
    const IntersectionLattice L = dynkin_lattice(tag);
    if (L.rank() != table.at(fiber_tag_name(tag))) ++b2_mismatch;
    if (!negative_definite(L.deleted_node_gram())) ++indefinite;
  }
  rec.require("b2_mismatches", b2_mismatch, b2_mismatch == 0, "b2 table");
  rec.require("indefinite_sublattices", indefinite, indefinite == 0, "deleted-node sublattice not negative definite");
  const IntersectionLattice D4 = dynkin_lattice(FiberTag::I0s);
  const auto r3 = enumerate_roots(D4, 3), r4 = enumerate_roots(D4, 4);
  rec.require("d4_cosets_m3", static_cast<double>(r3.cosets.size()), r3.cosets.size() == 24, "D~4 coset count at M = 3");
  rec.require("d4_cosets_m4", static_cast<double>(r4.cosets.size()), r4.cosets.size() == 24, "D~4 coset count at M = 4");
  int bad_b1 = 0;
  for (FiberTag tag : all_fiber_tags())
    if (mv_b1(standard_monodromy(tag)) != 1) ++bad_b1;
  rec.require("finite_monodromy_b1_mismatches", bad_b1, bad_b1 == 0, "finite monodromy b1 != 1");
  const int b1_id = mv_b1(identity_monodromy());
  rec.require("identity_b1", b1_id, b1_id == 3, "identity monodromy b1 != 3");
  int k3_bad = 0;
  for (int nu = 1; nu <= 4; ++nu) {
    const GluedBetti g = glued_betti(k3_pieces(nu));
    if (g.b1 != 0 || g.b2_plus != 3 || g.b2_minus != 19 || g.chi != 24) ++k3_bad;
  }
  rec.require("k3_betti_mismatches", k3_bad, k3_bad == 0, "glued Betti numbers != (0, 3, 19, 24)");
  int dim_bad = 0;
  for (int nu = 1; nu <= 4; ++nu)
    if (alg_star_moduli_dimension(nu) != 12 - 3 * nu) ++dim_bad;
  rec.require("moduli_dimension_mismatches", dim_bad, dim_bad == 0, "moduli dimension != 12 - 3 nu");
  return rec.finish();
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed, const CheckTolerances& t) {
  return {check_hk_algebra(seed, t),     check_closedness(seed, t), check_green_asymptotics(t),
          check_flux(t),                 check_balancing(t),        check_gluing_scaling(t),
          check_donaldson(seed, t),      check_topology(t)};
}

std::string serialize(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    std::vector<std::string> fails;
    for (const auto& f : r.failures)
      if (f != kOverBudget) fails.push_back(f);
    os << r.id << ' ' << r.title << ' ' << (fails.empty() ? "PASS" : "FAIL") << '\n';
    for (const auto& m : r.metrics) os << "  " << m.key << ' ' << fmt_num(m.value) << '\n';
    for (const auto& f : fails) os << "  failed " << f << '\n';
  }
  return os.str();
}

}  // namespace hkglue
