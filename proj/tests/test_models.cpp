#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"
#include "hkglue/models.hpp"

using namespace hkglue;

namespace {

ChartPoint polar(double r, double t1, double t2, double t3) { return make_point(ChartId::Polar4, {r, t1, t2, t3}); }

double triple_diff(const HKSample& a, const HKSample& b) {
  double d = 0;
  for (std::size_t i = 0; i < 3; ++i) d = std::max(d, (a.omega[i] - b.omega[i]).max_abs());
  return d;
}

std::vector<ChartPoint> polar_samples(std::uint64_t seed, int n, double rlo, double rhi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r(rlo, rhi), a(0, kTwoPi), t(-kPi, kPi);
  std::vector<ChartPoint> out;
  for (int i = 0; i < n; ++i) out.push_back(polar(r(rng), a(rng), t(rng), t(rng)));
  return out;
}

}  // namespace

TEST(AlgTable, RowsAreFrozen) {
  ASSERT_EQ(alg_table().size(), 7u);
  const AlgTableRow& ii = alg_row_by_tag("II");
  EXPECT_DOUBLE_EQ(ii.beta, 1.0 / 6.0);
  EXPECT_NEAR(std::abs(*ii.tau - std::polar(1.0, kTwoPi / 3)), 0.0, 1e-15);
  EXPECT_EQ(ii.b2, 9);
  EXPECT_EQ(alg_row_by_tag("III*").b2, 2);
  EXPECT_EQ(alg_row_by_beta(2.0 / 3.0).tag, "IV*");
  EXPECT_FALSE(alg_row_by_tag("I0*").tau.has_value());
  EXPECT_THROW(alg_row_by_tag("I1"), ConfigError);
  EXPECT_THROW(alg_row_by_beta(0.2), ConfigError);
}

TEST(AlgParams, RejectsInconsistentOverride) {
  EXPECT_THROW(make_alg_params("III", 1.0, 1.0, std::complex<double>(0.0, 2.0)), ConfigError);
  EXPECT_THROW(make_alg_params("I0*", 1.0, 1.0), ConfigError);
  EXPECT_NO_THROW(make_alg_params("I0*", 1.0, 1.0, std::complex<double>(0.3, 1.7)));
  ALGParams p = make_alg_params("IV", 1.0, 1.0);
  p.beta = 0.5;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(AlgModel, QIdentityAndSelfDual) {
  for (const auto& row : alg_table()) {
    const ALGParams p = make_alg_params(row.tag, 2.0, 1.0, row.tau.value_or(std::complex<double>(0.2, 1.1)));
    const HKTripleField t = alg_model_triple(p);
    const ChartPoint x = make_point(ChartId::Alg4, {3.0, 1.0, 0.4, -0.2});
    EXPECT_LT(q_error(q_matrix(t, x)), tol::kAlgebraic);
    EXPECT_LT(selfdual_residual(t, x), tol::kSelfDual);
  }
}

TEST(AlgModel, FiberArea) {
  for (const auto& row : alg_table()) {
    const std::complex<double> tau = row.tau.value_or(std::complex<double>(0.4, 1.3));
    const double L = 1.7;
    const ALGParams p = make_alg_params(row.tag, L, 1.0, tau);
    EXPECT_NEAR(alg_fiber_area(p), L * L * tau.imag(), 1e-12) << row.tag;
  }
}

TEST(AlgModel, SectorIdentificationFixesTriple) {
  for (const auto& row : alg_table()) {
    const ALGParams p = make_alg_params(row.tag, 1.0, 1.0, row.tau.value_or(std::complex<double>(0.0, 1.0)));
    const HKTripleField t = alg_model_triple(p);
    const HKTripleField u = pullback_triple(t, alg_sector_map(p));
    const ChartPoint x = make_point(ChartId::Alg4, {2.0, 0.5, 0.3, 0.9});
    EXPECT_LT(triple_diff(t.sample(x), u.sample(x)), 1e-12) << row.tag;
  }
}

TEST(AlgModel, ReduceLandsInSector) {
  const ALGParams p = make_alg_params("IV*", 1.5, 1.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) {
    const ChartPoint x = make_point(ChartId::Alg4, {u(rng), u(rng), u(rng), u(rng)});
    const ChartPoint y = alg_reduce(p, x);
    double arg = std::atan2(y[1], y[0]);
    if (arg < 0) arg += kTwoPi;
    EXPECT_LT(arg, kTwoPi * p.beta + 1e-12);
    EXPECT_NEAR(std::hypot(y[0], y[1]), std::hypot(x[0], x[1]), 1e-12);
  }
}

TEST(AlgStarParams, RadiusBound) {
  ALGStarParams p{2, 1.0, 1.0, 1.0};
  EXPECT_NEAR(p.r_min(), 1.0, 1e-15);
  EXPECT_THROW(p.validate(), ConfigError);
  p.R = 1.01;
  EXPECT_NO_THROW(p.validate());
}

TEST(AlgStarModel, DomainCheck) {
  const HKTripleField t = algstar_model_triple({2, 1.0, 1.0, 3.0});
  EXPECT_THROW(t.sample(make_point(ChartId::Cartesian4, {1.0, 1.0, 0.0, 0.0})), DomainError);
  EXPECT_NO_THROW(t.sample(make_point(ChartId::Cartesian4, {4.0, 1.0, 0.0, 0.0})));
}

TEST(AlgStarModel, PolarCoefficientsByHand) {
  // In polar form: dx^dy = r dr^dt1, Theta = (nu/pi)(dt3 - t2 dt1).
  const ALGStarParams p{2, 1.0, 1.0, 2.0};
  const HKTripleField t = algstar_model_triple_polar(p);
  const double r = 10, t1 = 0.3, t2 = 1.0;
  const HKSample s = t.sample(polar(r, t1, t2, 0.2));
  const double V = 1.0 + 2.0 / kPi * std::log(r), c = 2.0 / kPi;
  // w1 = V r dr^dt1 + dt2^Theta = V r dr^dt1 + c t2 dt1^dt2 + c dt2^dt3.
  EXPECT_NEAR(s.omega[0].get({0, 1}), V * r, 1e-12);
  EXPECT_NEAR(s.omega[0].get({1, 2}), c * t2, 1e-12);
  EXPECT_NEAR(s.omega[0].get({2, 3}), c, 1e-12);
  EXPECT_NEAR(s.omega[0].get({0, 2}), 0.0, 1e-12);
  // Volume V * c * r.
  EXPECT_NEAR(s.volume[0], V * c * r, 1e-11);
}

TEST(AlgStarModel, QAndSelfDualAt100Points) {
  const ALGStarParams p{3, 0.5, 1.5, 4.0};
  const HKTripleField t = algstar_model_triple_polar(p);
  for (const auto& x : polar_samples(7, 100, 4.5, 80.0)) {
    EXPECT_LT(q_error(q_matrix(t, x)), tol::kAlgebraic);
    EXPECT_LT(selfdual_residual(t, x), tol::kSelfDual);
  }
}

TEST(AlgStarModel, ScalingCovariance) {
  ALGStarParams a{1, 2.0, 1.0, 1.5}, b = a;
  b.L = 2.5;
  const HKTripleField ta = algstar_model_triple(a), tb = algstar_model_triple(b);
  const ChartPoint x = make_point(ChartId::Cartesian4, {3.0, -2.0, 0.4, 1.0});
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_LT((tb.sample(x).omega[i] - 6.25 * ta.sample(x).omega[i]).max_abs(), 1e-13);
}

TEST(AlgStarModel, DeckAndInvolutionInvariance) {
  for (int nu = 1; nu <= 4; ++nu) {
    const ALGStarParams p{nu, 1.0, 1.0, 2.0};
    const HKTripleField t = algstar_model_triple_polar(p);
    for (const ChartMap& m : {deck_sigma1(), deck_sigma2(), deck_sigma3(nu)}) {
      const HKTripleField u = pullback_triple(t, m);
      for (const auto& x : polar_samples(nu, 20, 3.0, 30.0)) {
        const HKSample a = t.sample(x), b = u.sample(x);
        EXPECT_LT(triple_diff(a, b), 1e-10);
        EXPECT_LT((a.metric - b.metric).cwiseAbs().maxCoeff(), 1e-10);
      }
    }
    const HKTripleField u = pullback_triple(t, involution_iota());
    for (const auto& x : polar_samples(10 + nu, 20, 3.0, 30.0)) EXPECT_LT(triple_diff(t.sample(x), u.sample(x)), 1e-12);
  }
}

TEST(AlgStarModel, RescaledMatchesClosedForm) {
  const ALGStarParams p{2, 1.0, 1.0, 2.0};
  const double lambda = 1e-2, xt = 0.3, yt = -0.4, t2 = 0.7;
  const HKTripleField t = algstar_rescaled_triple(p, lambda);
  const HKSample s = t.sample(make_point(ChartId::Cartesian4, {xt, yt, t2, 0.1}));
  const double rt = std::hypot(xt, yt);
  const double T = 2.0 / kPi * std::log(1.0 / lambda);
  const double Vt = T + 2.0 / kPi * std::log(rt) + 1.0;
  const double c = 2.0 / kPi;
  // Theta in (x~, y~): -(nu/pi) t2 (x~ dy~ - y~ dx~)/r~^2 + (nu/pi) dt3.
  const double Tx = c * t2 * yt / (rt * rt), Ty = -c * t2 * xt / (rt * rt);
  const double l2 = lambda * lambda;
  EXPECT_NEAR(s.omega[0].get({0, 1}), Vt, 1e-12);
  EXPECT_NEAR(s.omega[0].get({2, 3}), l2 * c, 1e-15);
  EXPECT_NEAR(s.omega[0].get({0, 2}), -l2 * Tx, 1e-15);
  EXPECT_NEAR(s.omega[1].get({0, 2}), lambda * Vt, 1e-13);
  EXPECT_NEAR(s.omega[1].get({1, 3}), -lambda * c, 1e-15);
  EXPECT_NEAR(s.omega[2].get({0, 3}), lambda * c, 1e-15);
  EXPECT_NEAR(s.omega[2].get({1, 2}), lambda * Vt, 1e-13);
  EXPECT_NEAR(s.omega[2].get({0, 1}), lambda * Ty, 1e-13);
  EXPECT_NEAR(s.metric(2, 2), l2 * Vt, 1e-14);
}

TEST(AlgStarModel, HolomorphicCoordinate) {
  const auto u = algstar_holomorphic_coordinate(polar(2.0, 0.3, 0.0, 0.0));
  EXPECT_NEAR(std::abs(u - std::polar(4.0, 0.6)), 0.0, 1e-14);
  const auto v = algstar_holomorphic_coordinate(make_point(ChartId::Cartesian4, {2.0 * std::cos(0.3), 2.0 * std::sin(0.3), 0, 0}));
  EXPECT_NEAR(std::abs(u - v), 0.0, 1e-13);
}

TEST(Semiflat, HarmonicAndClosedForm) {
  const double lambda = 0.01, T = 1.0 / kPi * std::log(100.0);
  const HarmonicPotential V = semiflat_potential(T, 2, {}, lambda, std::pow(lambda, 0.5));
  EXPECT_LT(std::abs(fd_laplacian(V.value, Vec3(30.0, -20.0, 0.3), 1e-3)), 1e-6);
  EXPECT_LT(std::abs(fd_laplacian(V.value, Vec3(0.5, 0.2, 0.0), 1e-3)), 1e-6);
  HoloSeries h;
  h.coeffs = {{0.0, 0.3}};
  const HarmonicPotential W = semiflat_potential(T, 2, h, lambda, std::pow(lambda, 0.5));
  const double rt = std::exp(kPi * T / 2);
  EXPECT_NEAR(W.value(Vec3(rt / lambda, 0.0, 0.0)), 0.3, 1e-12);
}

TEST(Semiflat, GradientMatchesFd) {
  HoloSeries h;
  h.coeffs = {{0.0, 1.0}, {0.5, -0.2}, {0.0, 0.3}};
  const auto p = choose_monopole_points(1, 2, 0.0, 0, h, 0.05);
  const HarmonicPotential V = semiflat_potential(p);
  const Vec3 x(40.0, 13.0, 0.5);
  const Vec3 g = V.gradient(x);
  for (int k = 0; k < 2; ++k) {
    Vec3 xp = x, xm = x;
    xp[k] += 1e-4;
    xm[k] -= 1e-4;
    EXPECT_NEAR(g[k], (V.value(xp) - V.value(xm)) / 2e-4, 1e-8);
  }
}

TEST(Semiflat, AgreesWithNeckFarOut) {
  // |G_lambda - V_SF| <= C lambda^2 / r~^2 at r~ = 0.5 r_lambda; here the
  // r~^2 scaling is checked at two radii.
  const auto p = choose_monopole_points(1, 1, 0.0, 5, {}, 0.01);
  const HarmonicPotential V = semiflat_potential(p);
  double d1 = 0, d2 = 0;
  for (int k = 0; k < 64; ++k) {
    const double a = kTwoPi * k / 64;
    d1 = std::max(d1, std::abs(green_neck(p, Vec3(10.0 / p.lambda * std::cos(a), 10.0 / p.lambda * std::sin(a), 0)) -
                                   V.value(Vec3(10.0 / p.lambda * std::cos(a), 10.0 / p.lambda * std::sin(a), 0))));
    d2 = std::max(d2, std::abs(green_neck(p, Vec3(20.0 / p.lambda * std::cos(a), 20.0 / p.lambda * std::sin(a), 0)) -
                                   V.value(Vec3(20.0 / p.lambda * std::cos(a), 20.0 / p.lambda * std::sin(a), 0))));
  }
  EXPECT_LT(d1, 1.0 / 100.0);
  EXPECT_NEAR(std::log2(d1 / d2), 2.0, 0.2);
}

TEST(Gauge, IdentityWhenTrivial) {
  GaugeFunction f{[](double, double, double) { return 0.0; }, {}};
  const GaugeNormalization g = gauge_normalize(f, 0.0);
  const ChartPoint x = make_point(ChartId::Cartesian4, {3.0, 1.0, 0.5, 0.2});
  const ChartPoint y = g.map.map(x);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(y[i], x[i], 1e-15);
  EXPECT_LT((g.map.jacobian(x) - SmallMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Gauge, HyperkahlerRotation) {
  const int nu = 2;
  const double q = 0.7;
  GaugeFunction f{[](double, double, double) { return 0.0; }, {}};
  const GaugeNormalization g = gauge_normalize(f, q);
  const HarmonicPotential V = model_potential(nu, 1.0);
  const HKTripleField tilde = build_gh_triple(V, twisted_connection(nu, f, q));
  const HKTripleField plain = build_gh_triple(V, model_connection(nu));
  const HKTripleField pulled = pullback_triple(tilde, g.map);
  for (const auto& pp : polar_samples(3, 20, 2.0, 20.0)) {
    const ChartPoint x = to_cartesian(pp);
    const HKSample a = pulled.sample(x), b = plain.sample(x);
    EXPECT_LT((a.omega[0] - b.omega[0]).max_abs(), 1e-9);
    EXPECT_LT((a.omega[1] - (std::cos(q) * b.omega[1] + std::sin(q) * b.omega[2])).max_abs(), 1e-9);
    EXPECT_LT((a.omega[2] - (std::cos(q) * b.omega[2] - std::sin(q) * b.omega[1])).max_abs(), 1e-9);
  }
}

TEST(Gauge, ExactGaugeFunctionCancels) {
  const int nu = 1;
  GaugeFunction f{[](double, double t1, double t2) { return std::sin(t1) * std::cos(t2); }, {}};
  const GaugeNormalization g = gauge_normalize(f, 0.0);
  EXPECT_NEAR(g.c, 0.0, 1e-12);
  const LocalConnection tilde = twisted_connection(nu, f, 0.0);
  const LocalConnection plain = model_connection(nu);
  for (const auto& pp : polar_samples(4, 20, 1.0, 10.0)) {
    const ChartPoint x = to_cartesian(pp);
    const ChartPoint y = g.map.map(x);
    const Vec3 a = tilde.A(Vec3(y[0], y[1], y[2]));
    Alt th(4, 1);
    th[0] = a.x();
    th[1] = a.y();
    th[2] = a.z();
    th[3] = tilde.fiber_coeff;
    const Alt pulled = pullback(th, g.map.jacobian(x));
    const Vec3 b = plain.A(Vec3(x[0], x[1], x[2]));
    Alt ref(4, 1);
    ref[0] = b.x();
    ref[1] = b.y();
    ref[2] = b.z();
    ref[3] = plain.fiber_coeff;
    EXPECT_LT((pulled - ref).max_abs(), 1e-8);
  }
}

TEST(Gauge, RejectsIncompatibleFunction) {
  GaugeFunction f{[](double r, double t1, double) { return r * std::cos(2 * t1); }, {}};
  EXPECT_THROW(gauge_normalize(f, 0.0), PreconditionError);
}

TEST(ModelConfig, ParsesBothFamilies) {
  const ModelConfig a = parse_model_config("family = ALG\nbeta = 0.25\nL = 2\nR = 1 # comment\n");
  ASSERT_TRUE(std::holds_alternative<ALGParams>(a));
  EXPECT_EQ(std::get<ALGParams>(a).tag, "III");
  EXPECT_NEAR(std::abs(std::get<ALGParams>(a).tau - std::complex<double>(0, 1)), 0.0, 1e-15);
  const ModelConfig b = parse_model_config("family=ALGstar\nnu=2\nkappa0=1\nL=1\nR=3\n");
  ASSERT_TRUE(std::holds_alternative<ALGStarParams>(b));
  EXPECT_EQ(std::get<ALGStarParams>(b).nu, 2);
  const ModelConfig c = parse_model_config("family=ALG\ntag=I0*\ntau=0.5,2\nL=1\nR=1\n");
  EXPECT_NEAR(std::get<ALGParams>(c).tau.imag(), 2.0, 1e-15);
  const ModelConfig d = parse_model_config("family=ALG\nbeta = 1/6\nL=1\nR=1\n");
  EXPECT_EQ(std::get<ALGParams>(d).tag, "II");
}

TEST(ModelConfig, RejectsBadInput) {
  EXPECT_THROW(parse_model_config("family=ALG\nbeta=0.25\ntau=0,2\nL=1\nR=1\n"), ConfigError);
  EXPECT_THROW(parse_model_config("family=ALGstar\nnu=2\nkappa0=1\nL=1\nR=0.5\n"), ConfigError);
  EXPECT_THROW(parse_model_config("family=ALGstar\nnu=2\nkappa0=1\nL=1\nR=3\ncolour=red\n"), ConfigError);
  EXPECT_THROW(parse_model_config("family=K3\n"), ConfigError);
  EXPECT_THROW(parse_model_config("family=ALG\nbeta=0.3\nL=1\nR=1\n"), ConfigError);
  EXPECT_THROW(parse_model_config("family=ALG\nbeta=1/0\nL=1\nR=1\n"), ConfigError);
  EXPECT_THROW(parse_model_config("family=ALG\nbeta=1/3\ntau=i\nL=1\nR=1\n"), ConfigError);
}
