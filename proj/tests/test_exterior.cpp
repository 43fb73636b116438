#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"
#include "hkglue/exterior.hpp"
#include "hkglue/regression.hpp"

using namespace hkglue;

namespace {

Alt random_alt(std::mt19937_64& rng, int n, int k) {
  std::uniform_real_distribution<double> u(-1, 1);
  Alt a(n, k);
  for (int i = 0; i < a.size(); ++i) a[i] = u(rng);
  return a;
}

SmallMatrix random_spd(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  SmallMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return m * m.transpose() + 0.5 * SmallMatrix::Identity(n, n);
}

}  // namespace

TEST(Alt, BasisOrderingAndSign) {
  const Alt dxdy = Alt::basis(4, {0, 1});
  EXPECT_EQ(dxdy[0], 1.0);
  const Alt dydx = Alt::basis(4, {1, 0});
  EXPECT_EQ(dydx[0], -1.0);
  EXPECT_EQ(dydx.get({0, 1}), -1.0);
  EXPECT_EQ(dydx.get({1, 0}), 1.0);
  EXPECT_EQ(Alt::basis(4, {2, 2}).max_abs(), 0.0);
  EXPECT_EQ(Alt(4, 2).size(), 6);
  EXPECT_EQ(Alt(3, 3).size(), 1);
  EXPECT_EQ(Alt(4, 0).size(), 1);
}

TEST(Wedge, AntisymmetryAndBasisCase) {
  const Alt dx = Alt::basis(4, {0}), dy = Alt::basis(4, {1});
  EXPECT_EQ(wedge(dx, dx).max_abs(), 0.0);
  EXPECT_EQ(wedge(dx, dy).get({0, 1}), 1.0);
  EXPECT_EQ(wedge(dy, dx).get({0, 1}), -1.0);
}

TEST(Wedge, GradedCommutativityProperty) {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k <= n; ++k)
      for (int l = 0; k + l <= n; ++l)
        for (int trial = 0; trial < 20; ++trial) {
          const Alt a = random_alt(rng, n, k), b = random_alt(rng, n, l);
          const double sign = ((k * l) % 2) ? -1.0 : 1.0;
          EXPECT_LT((wedge(a, b) - sign * wedge(b, a)).max_abs(), 1e-12);
        }
}

TEST(Wedge, DegreeOverflowIsStructural) {
  EXPECT_THROW(wedge(Alt(3, 2), Alt(3, 2)), StructuralError);
  EXPECT_THROW(wedge(Alt(3, 1), Alt(4, 1)), StructuralError);
}

TEST(Wedge, ChartMismatchIsStructural) {
  const auto a = constant_form(ChartId::Cartesian4, Alt::basis(4, {0}));
  const auto b = constant_form(ChartId::Polar4, Alt::basis(4, {1}));
  EXPECT_THROW(wedge(a, b), StructuralError);
}

TEST(Wedge, CoframeProductIsRiemannianVolume) {
  // Coframe E = (V^1/2 dx, V^1/2 dy, V^1/2 dt2, V^-1/2 Theta) with
  // Theta = (nu/pi)(dt3 - t2 dt1); hand expansion: E1^E2^E3^E4 = V (nu/pi) dx^dy^dt2^dt3.
  const int nu = 2;
  const double x = 3.0, y = -1.5, t2 = 0.7, kappa0 = 1.0;
  const double r2 = x * x + y * y;
  const double V = kappa0 + nu / kPi * 0.5 * std::log(r2);
  const double s = nu / kPi;
  Alt theta(4, 1);
  theta[0] = s * t2 * y / r2;
  theta[1] = -s * t2 * x / r2;
  theta[3] = s;
  const double rv = std::sqrt(V);
  const Alt top = wedge(wedge(rv * Alt::basis(4, {0}), rv * Alt::basis(4, {1})),
                        wedge(rv * Alt::basis(4, {2}), (1.0 / rv) * theta));
  EXPECT_NEAR(top[0], V * s, 1e-13);
}

TEST(Hodge, DoubleStarSignProperty) {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k <= n; ++k)
      for (int trial = 0; trial < 25; ++trial) {
        const SmallMatrix g = random_spd(rng, n);
        const Alt a = random_alt(rng, n, k);
        const double sign = ((k * (n - k)) % 2) ? -1.0 : 1.0;
        EXPECT_LT((hodge(hodge(a, g), g) - sign * a).max_abs(), 1e-10 * (1 + a.max_abs()));
      }
}

TEST(Hodge, StarOneIsVolume) {
  const SmallMatrix g = flat_polar_base_metric()(make_point(ChartId::PolarBase3, {2.5, 0.4, 1.0}));
  const Alt vol = hodge(Alt::scalar(3, 1.0), g);
  EXPECT_NEAR(vol[0], 2.5, 1e-14);
}

TEST(Hodge, StarOfDlogRIsAngularArea) {
  // In (r, t1, t2): d log r = dr / r; star(dr / r) = dt1 ^ dt2.
  const double r = 3.7;
  const SmallMatrix g = flat_polar_base_metric()(make_point(ChartId::PolarBase3, {r, 1.1, 0.2}));
  Alt dlog(3, 1);
  dlog[0] = 1.0 / r;
  const Alt s = hodge(dlog, g);
  EXPECT_NEAR(s.get({1, 2}), 1.0, 1e-14);
  EXPECT_NEAR(s.get({0, 1}), 0.0, 1e-14);
  EXPECT_NEAR(s.get({0, 2}), 0.0, 1e-14);
}

TEST(Hodge, DegenerateMetricIsNumericError) {
  SmallMatrix g = SmallMatrix::Identity(3, 3);
  g(2, 2) = 0.0;
  EXPECT_THROW(hodge(Alt::basis(3, {0}), g), NumericError);
  MetricField m;
  m.chart = ChartId::Base3;
  m.eval = [](const ChartPoint&) {
    SmallMatrix h = SmallMatrix::Identity(3, 3);
    h(0, 0) = -1.0;
    return h;
  };
  EXPECT_THROW(m(make_point(ChartId::Base3, {0, 0, 0})), NumericError);
}

TEST(Inner, MatchesHodgeIdentity) {
  // a ^ star b = <a, b> vol.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const SmallMatrix g = random_spd(rng, 4);
    const Alt a = random_alt(rng, 4, 2), b = random_alt(rng, 4, 2);
    const double lhs = wedge(a, hodge(b, g))[0];
    EXPECT_NEAR(lhs, inner(a, b, g) * std::sqrt(g.determinant()), 1e-10);
  }
}

TEST(Pullback, LinearMapMinors) {
  // Rotation by q in the (x, y) plane fixes dx^dy.
  const double q = 0.7;
  SmallMatrix J = SmallMatrix::Identity(4, 4);
  J(0, 0) = std::cos(q);
  J(0, 1) = -std::sin(q);
  J(1, 0) = std::sin(q);
  J(1, 1) = std::cos(q);
  const Alt w = Alt::basis(4, {0, 1});
  EXPECT_LT((pullback(w, J) - w).max_abs(), 1e-15);
  const Alt dx = Alt::basis(4, {0});
  const Alt pdx = pullback(dx, J);
  EXPECT_NEAR(pdx[0], std::cos(q), 1e-15);
  EXPECT_NEAR(pdx[1], -std::sin(q), 1e-15);
}

TEST(Charts, PolarRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    const ChartPoint p = make_point(ChartId::Cartesian4, {u(rng), u(rng), u(rng), u(rng)});
    const ChartPoint q = to_polar(p);
    EXPECT_GE(q[1], 0.0);
    EXPECT_LT(q[1], kTwoPi);
    const ChartPoint back = to_cartesian(q);
    const double scale = std::hypot(p[0], p[1]);
    EXPECT_LT(std::abs(back[0] - p[0]), tol::kPolarRoundTrip * scale);
    EXPECT_LT(std::abs(back[1] - p[1]), tol::kPolarRoundTrip * scale);
  }
  EXPECT_THROW(to_polar(make_point(ChartId::Cartesian4, {0, 0, 1, 1})), DomainError);
}

TEST(Charts, AngleReduction) {
  const double period3 = 2 * kPi * kPi / 2;
  const ChartPoint p = reduce_angles(make_point(ChartId::Polar4, {1.0, -0.5, 7.0, 11.0}), period3);
  EXPECT_NEAR(p[1], kTwoPi - 0.5, 1e-14);
  EXPECT_NEAR(p[2], 7.0 - kTwoPi, 1e-14);
  EXPECT_NEAR(p[3], 11.0 - period3, 1e-13);
  EXPECT_THROW(reduce_angles(make_point(ChartId::Polar4, {-1.0, 0, 0, 0}), period3), DomainError);
}

TEST(ExteriorDerivative, ConstantGivesZero) {
  const auto c = scalar_field(ChartId::Cartesian4, [](const ChartPoint&) { return 3.0; });
  const Alt d = fd_exterior_derivative(c, 1e-4)(make_point(ChartId::Cartesian4, {1, 2, 3, 4}));
  EXPECT_EQ(d.max_abs(), 0.0);
}

TEST(ExteriorDerivative, LinearCoefficientIsExact) {
  DifferentialForm xdy;
  xdy.chart = ChartId::Cartesian4;
  xdy.degree = 1;
  xdy.eval = [](const ChartPoint& p) { return p[0] * Alt::basis(4, {1}); };
  const Alt d = fd_exterior_derivative(xdy, 1e-4)(make_point(ChartId::Cartesian4, {0.3, -2, 1, 5}));
  EXPECT_NEAR(d.get({0, 1}), 1.0, 1e-10);
  EXPECT_LT((d - Alt::basis(4, {0, 1})).max_abs(), 1e-10);
}

TEST(ExteriorDerivative, ModelConnectionCurvature) {
  // Theta = (nu/pi)(dt3 - t2 dt1) on the polar chart, nu = 2.
  const int nu = 2;
  DifferentialForm theta;
  theta.chart = ChartId::Polar4;
  theta.degree = 1;
  theta.eval = [nu](const ChartPoint& p) {
    Alt a(4, 1);
    a[1] = -nu / kPi * p[2];
    a[3] = nu / kPi;
    return a;
  };
  const Alt d = fd_exterior_derivative(theta, 1e-4)(make_point(ChartId::Polar4, {5.0, 0.4, 1.3, 0.2}));
  EXPECT_NEAR(d.get({1, 2}), 2.0 / kPi, 1e-10);
  EXPECT_LT((d - (2.0 / kPi) * Alt::basis(4, {1, 2})).max_abs(), 1e-10);
}

TEST(ExteriorDerivative, ExactOverridesFd) {
  DifferentialForm f = scalar_field(ChartId::Base3, [](const ChartPoint& p) { return p[0] * p[0]; });
  f.exact_d = [](const ChartPoint&) { return 42.0 * Alt::basis(3, {2}); };
  const auto p = make_point(ChartId::Base3, {1, 1, 1});
  EXPECT_EQ(exterior_derivative(f, 1e-4)(p).get({2}), 42.0);
  EXPECT_NEAR(fd_exterior_derivative(f, 1e-4)(p).get({0}), 2.0, 1e-8);
}

TEST(ExteriorDerivative, RejectsStencilNearPole) {
  DifferentialForm f = scalar_field(ChartId::Base3, [](const ChartPoint& p) { return 1.0 / p[0]; });
  f.clearance = [](const ChartPoint& p) { return std::abs(p[0]); };
  EXPECT_THROW(fd_derivative_at(f, make_point(ChartId::Base3, {1.5e-4, 0, 0}), 1e-4), DomainError);
  EXPECT_NO_THROW(fd_derivative_at(f, make_point(ChartId::Base3, {1.0, 0, 0}), 1e-4));
}

TEST(ExteriorDerivative, DdVanishesAtSecondOrder) {
  // alpha = df in closed form for f = sin x cos y e^{t/3} + x y t s; FD d(alpha)
  // must vanish with observed order close to 2.
  DifferentialForm alpha;
  alpha.chart = ChartId::Cartesian4;
  alpha.degree = 1;
  alpha.eval = [](const ChartPoint& p) {
    const double x = p[0], y = p[1], t = p[2], s = p[3];
    const double e = std::exp(t / 3);
    Alt a(4, 1);
    a[0] = std::cos(x) * std::cos(y) * e + y * t * s;
    a[1] = -std::sin(x) * std::sin(y) * e + x * t * s;
    a[2] = std::sin(x) * std::cos(y) * e / 3 + x * y * s;
    a[3] = x * y * t;
    return a;
  };
  const auto p = make_point(ChartId::Cartesian4, {0.4, 1.1, -0.3, 0.8});
  std::vector<double> hs{1e-2, 5e-3, 2.5e-3}, res;
  for (double h : hs) res.push_back(fd_exterior_derivative(alpha, h)(p).max_abs());
  const LogLogFit fit = fit_loglog(hs, res);
  EXPECT_GE(fit.slope, 1.9);
  // Applying FD twice cancels exactly up to rounding.
  const auto f = scalar_field(ChartId::Cartesian4, [](const ChartPoint& q) { return std::sin(q[0]) * q[1] * q[2]; });
  EXPECT_LT(fd_exterior_derivative(fd_exterior_derivative(f, 1e-3), 1e-3)(p).max_abs(), 1e-6);
}

TEST(ExteriorDerivative, WedgeLeibnizWithExactParts) {
  DifferentialForm f = scalar_field(ChartId::Base3, [](const ChartPoint& p) { return p[0] * p[1]; });
  f.exact_d = [](const ChartPoint& p) {
    Alt a(3, 1);
    a[0] = p[1];
    a[1] = p[0];
    return a;
  };
  const DifferentialForm dt = constant_form(ChartId::Base3, Alt::basis(3, {2}));
  const DifferentialForm w = wedge(f, dt);
  const auto p = make_point(ChartId::Base3, {0.5, 2.0, 1.0});
  const Alt exact = exterior_derivative(w, 1e-4)(p);
  const Alt fd = fd_exterior_derivative(w, 1e-4)(p);
  EXPECT_LT((exact - fd).max_abs(), 1e-9);
}

TEST(HodgeStar, FormLevelOnFlatBase) {
  DifferentialForm dr;
  dr.chart = ChartId::PolarBase3;
  dr.degree = 1;
  dr.eval = [](const ChartPoint&) { return Alt::basis(3, {0}); };
  const auto s = hodge_star(dr, flat_polar_base_metric());
  EXPECT_NEAR(s(make_point(ChartId::PolarBase3, {4.0, 0.1, 0.2})).get({1, 2}), 4.0, 1e-14);
}
