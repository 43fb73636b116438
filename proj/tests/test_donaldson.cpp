#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hkglue/donaldson.hpp"
#include "hkglue/random.hpp"
#include "hkglue/regression.hpp"

using namespace hkglue;

namespace {

Eigen::Matrix3d random_symmetric(Rng& g, double a) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = uniform(g, -a, a);
  return 0.5 * (m + m.transpose());
}

Eigen::Matrix3d random_q(Rng& g) {
  const Eigen::Matrix3d q = Eigen::Matrix3d::Identity() + random_symmetric(g, 0.05);
  return q / std::cbrt(q.determinant());
}

SymTF3 random_s(Rng& g, double radius) {
  Vec5 v;
  for (int i = 0; i < 5; ++i) v[i] = standard_normal(g);
  return SymTF3(v / v.norm() * radius);
}

// Diagonal oracle at Q = Id: A = diag(a) with a_i^2 + 2 a_i = s_i + mu and
// sum a_i = 0, i.e. a_i = -1 + sqrt(1 + s_i + mu). Bisection on mu.
Eigen::Vector3d diagonal_oracle(const Eigen::Vector3d& s) {
  auto sum = [&](double mu) {
    double t = 0;
    for (int i = 0; i < 3; ++i) t += -1.0 + std::sqrt(1.0 + s[i] + mu);
    return t;
  };
  double lo = -1.0 - s.minCoeff(), hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (sum(mid) > 0 ? hi : lo) = mid;
  }
  Eigen::Vector3d a;
  for (int i = 0; i < 3; ++i) a[i] = -1.0 + std::sqrt(1.0 + s[i] + 0.5 * (lo + hi));
  return a;
}

// 2-forms on R^4 in the basis (01, 02, 03, 12, 13, 23); a ^ b / dvol.
using Form4 = Eigen::Matrix<double, 6, 1>;
double wedge(const Form4& a, const Form4& b) {
  return a[0] * b[5] + a[5] * b[0] - a[1] * b[4] - a[4] * b[1] + a[2] * b[3] + a[3] * b[2];
}
Form4 form(double f01, double f02, double f03, double f12, double f13, double f23) {
  Form4 f;
  f << f01, f02, f03, f12, f13, f23;
  return f;
}
const std::array<Form4, 3> kSelfDual = {form(1, 0, 0, 0, 0, 1), form(0, 1, 0, 0, -1, 0), form(0, 0, 1, 1, 0, 0)};
const std::array<Form4, 3> kAntiSelfDual = {form(1, 0, 0, 0, 0, -1), form(0, 1, 0, 0, 1, 0), form(0, 0, 1, -1, 0, 0)};

Eigen::Matrix3d pairing(const std::array<Form4, 3>& w) {
  Eigen::Matrix3d q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q(i, j) = 0.5 * wedge(w[i], w[j]);
  return q;
}

}  // namespace

TEST(Tf, IdentityAndDiagonal) {
  EXPECT_LT(tf(Eigen::Matrix3d::Identity()).norm(), 1e-15);
  const Eigen::Matrix3d d = tf(Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix()).matrix();
  EXPECT_LT((d - Eigen::Vector3d(-1, 0, 1).asDiagonal().toDenseMatrix()).norm(), 1e-15);
}

TEST(Tf, IdempotentOnSymmetric) {
  Rng g(11);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Matrix3d b = random_symmetric(g, 3.0);
    const SymTF3 once = tf(b);
    EXPECT_LT((tf(once.matrix()) - once).norm(), 1e-14);
  }
}

TEST(SymTF3, CoordinatesAreFrobeniusIsometric) {
  Rng g(3);
  for (int k = 0; k < 50; ++k) {
    const SymTF3 s = random_s(g, uniform(g, 0.1, 5.0));
    const Eigen::Matrix3d m = s.matrix();
    EXPECT_NEAR(m.norm(), s.norm(), 1e-14 * s.norm());
    EXPECT_LT(std::abs(m.trace()), 1e-15 * std::max(1.0, s.norm()) * 8);
    EXPECT_LT((m - m.transpose()).norm(), 1e-300);
  }
}

TEST(DefiniteTripleData, NormalizationAndVolume) {
  DefiniteTripleData d;
  d.Q = Eigen::Vector3d(1, 2, 4).asDiagonal();
  d.dvol0 = 3.0;
  EXPECT_NEAR(d.normalized().determinant(), 1.0, 1e-12);
  EXPECT_NEAR(d.volume_scale(), 6.0, 1e-12);
  d.Q(0, 0) = -1;
  EXPECT_THROW(d.validate(), PreconditionError);
}

TEST(G0Map, ZeroAndExpansionAtIdentity) {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  EXPECT_EQ(g0_map(SymTF3(), I).norm(), 0.0);
  Rng g(5);
  for (int k = 0; k < 20; ++k) {
    const SymTF3 S = random_s(g, 1.0);
    const double eps = 1e-2;
    const SymTF3 expect = S * (2 * eps) + tf(S.matrix() * S.matrix()) * (eps * eps);
    EXPECT_LT((g0_map(S * eps, I) - expect).norm(), 1e-15);
  }
}

TEST(G0Map, RejectsUnnormalizedQ) {
  EXPECT_THROW(g0_map(SymTF3(), 2.0 * Eigen::Matrix3d::Identity()), PreconditionError);
  Eigen::Matrix3d asym = Eigen::Matrix3d::Identity();
  asym(0, 1) = 0.1;
  EXPECT_THROW(g0_map(SymTF3(), asym), PreconditionError);
}

TEST(G0Map, JacobianMatchesCentralDifferences) {
  Rng g(8);
  const Eigen::Matrix3d Q = random_q(g);
  const SymTF3 A = random_s(g, 0.2);
  const Mat5 J = g0_jacobian(A, Q);
  const double h = 1e-6;
  for (int k = 0; k < 5; ++k) {
    SymTF3 e;
    e.c[k] = h;
    const Vec5 fd = (g0_map(A + e, Q) - g0_map(A - e, Q)).c / (2 * h);
    EXPECT_LT((fd - J.col(k)).norm(), 1e-9);
  }
}

TEST(F0Inverse, ZeroAndFirstOrderAtIdentity) {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  EXPECT_EQ(f0_inverse(SymTF3(), I).norm(), 0.0);
  const double eps = 1e-3;
  const SymTF3 S = tf(Eigen::Vector3d(-eps, 0, eps).asDiagonal().toDenseMatrix());
  const SymTF3 A = f0_inverse(S, I);
  EXPECT_LE((A - S * 0.5).norm(), eps * eps);
}

TEST(F0Inverse, MatchesDiagonalClosedForm) {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  for (const Eigen::Vector3d s : {Eigen::Vector3d(-0.05, 0.01, 0.04), Eigen::Vector3d(0.06, -0.03, -0.03),
                                   Eigen::Vector3d(-0.3, 0.1, 0.2)}) {
    const SymTF3 S = tf(s.asDiagonal().toDenseMatrix());
    const Eigen::Matrix3d A = f0_inverse(S, I).matrix();
    const Eigen::Vector3d a = diagonal_oracle(s);
    EXPECT_LT((A - a.asDiagonal().toDenseMatrix()).norm(), 1e-12);
  }
}

TEST(F0Inverse, RoundTripOverSampledBall) {
  Rng g(2024);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Matrix3d Q = random_q(g);
    const SymTF3 S = random_s(g, 0.1 * uniform01(g));
    worst = std::max(worst, (g0_map(f0_inverse(S, Q), Q) - S).norm());
  }
  EXPECT_LT(worst, 1e-11);
}

TEST(F0Inverse, DeviationFromLinearInverseIsQuadratic) {
  Rng g(17);
  const Eigen::Matrix3d Q = random_q(g);
  const SymTF3 S = random_s(g, 1.0);
  std::vector<double> eps, dev;
  for (double e : {0.08, 0.04, 0.02, 0.01, 0.005}) {
    eps.push_back(e);
    dev.push_back((f0_inverse(S * e, Q) - g0_linear_inverse(S * e, Q)).norm());
  }
  const LogLogFit f = fit_loglog(eps, dev);
  EXPECT_NEAR(f.slope, 2.0, 0.05);
  for (std::size_t i = 0; i < eps.size(); ++i) EXPECT_LE(dev[i], eps[i] * eps[i]);
}

TEST(F0Inverse, BatchKeepsInputOrder) {
  Rng g(4);
  const Eigen::Matrix3d Q = random_q(g);
  std::vector<SymTF3> S;
  for (int k = 0; k < 16; ++k) S.push_back(random_s(g, 0.05));
  const auto A = f0_inverse_batch(S, Q);
  ASSERT_EQ(A.size(), S.size());
  for (std::size_t k = 0; k < S.size(); ++k) EXPECT_EQ((A[k] - f0_inverse(S[k], Q)).norm(), 0.0);
}

TEST(F0Inverse, FailureCarriesLastIterate) {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  const SymTF3 S = tf(Eigen::Vector3d(-0.05, 0.0, 0.05).asDiagonal().toDenseMatrix());
  try {
    f0_inverse(S, I, 0.0);
    FAIL() << "zero tolerance cannot be met";
  } catch (const NoLocalInverseError& e) {
    EXPECT_LT((g0_map(e.last_iterate(), I) - S).norm(), 1e-14);
    EXPECT_LT(e.residual(), 1e-14);
  }
}

// Brute force on R^4: w = P e (e the standard self-dual basis) has Q = P P^T.
// Adding theta = A w + theta^- with A = F0(TF(-Q_w - S)) must give a triple
// whose pairing matrix is a multiple of the identity.
TEST(F0Inverse, SolvesTripleEquationOnFourForms) {
  Rng g(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix3d target = Eigen::Matrix3d::Identity() * uniform(g, 0.5, 2.0) + random_symmetric(g, 0.03);
    const Eigen::Matrix3d P = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(target).operatorSqrt();
    std::array<Form4, 3> w, minus;
    Eigen::Matrix3d C;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) C(i, j) = uniform(g, -0.08, 0.08);
    for (int i = 0; i < 3; ++i) {
      w[i].setZero();
      minus[i].setZero();
      for (int j = 0; j < 3; ++j) {
        w[i] += P(i, j) * kSelfDual[j];
        minus[i] += C(i, j) * kAntiSelfDual[j];
      }
    }
    const Eigen::Matrix3d Q = pairing(w);
    ASSERT_LT((Q - target).norm(), 1e-12);
    const double vol = std::cbrt(Q.determinant());
    const Eigen::Matrix3d Qw = Q / vol;
    const Eigen::Matrix3d S = pairing(minus) / vol;
    const SymTF3 rhs = tf(-Qw - S);
    const Eigen::Matrix3d A = f0_inverse(rhs, Qw).matrix();

    std::array<Form4, 3> total;
    for (int i = 0; i < 3; ++i) {
      total[i] = w[i] + minus[i];
      for (int j = 0; j < 3; ++j) total[i] += A(i, j) * w[j];
    }
    EXPECT_LT(tf(pairing(total)).norm(), 1e-11);
    EXPECT_LT((tf(Qw * A.transpose() + A * Qw + A * Qw * A.transpose()) - rhs).norm(), 1e-11);
  }
}

// Writing the linear term as Q A^T + Q A instead of Q A^T + A Q is not the
// pairing of w with A w once A and Q do not commute.
TEST(F0Inverse, LinearTermOrderingMatters) {
  Rng g(7);
  const Eigen::Matrix3d Q = random_q(g);
  const Eigen::Matrix3d A = random_s(g, 0.1).matrix();
  const Eigen::Matrix3d good = Q * A.transpose() + A * Q;
  const Eigen::Matrix3d literal = Q * A.transpose() + Q * A;
  EXPECT_LT((good - good.transpose()).norm(), 1e-15);
  EXPECT_GT((literal - literal.transpose()).norm(), 1e-4);
}

TEST(IftSolve, LinearCaseTakesOneStep) {
  IftProblem p;
  p.L = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  p.F0 = Eigen::Vector3d(1e-3, -2e-3, 5e-4);
  p.N = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()).eval(); };
  p.C_L = 0.5;
  p.C_N = 1.0;
  p.r = 0.1;
  const IftResult r = ift_solve(p);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LT((r.x + p.F0 / 2.0).norm(), 1e-18);
}

TEST(IftSolve, ScalarClosedForm) {
  const double a = 1e-3;
  IftProblem p;
  p.F0 = Eigen::VectorXd::Constant(1, -a);
  p.L = Eigen::MatrixXd::Identity(1, 1);
  p.N = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square()); };
  p.C_L = 1.0;
  p.C_N = 1.0;
  p.r = 0.05;
  const IftResult r = ift_solve(p);
  const double root = (-1.0 + std::sqrt(1.0 + 4 * a)) / 2.0;
  EXPECT_LT(std::abs(r.x[0] - root), 1e-14);
  EXPECT_LT(r.residual, 1e-14);
  EXPECT_LE(std::abs(r.x[0]), 2 * a);
}

TEST(IftSolve, AgreesWithF0InverseAtIdentity) {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  Rng g(31);
  for (int k = 0; k < 10; ++k) {
    const SymTF3 S = random_s(g, 0.035 * uniform(g, 0.1, 1.0));
    IftProblem p;
    p.F0 = -S.c;
    p.L = Eigen::MatrixXd::Identity(5, 5) * 2.0;
    p.N = [](const Eigen::VectorXd& x) {
      const Eigen::Matrix3d a = SymTF3(Vec5(x)).matrix();
      return Eigen::VectorXd(tf(a * a).c);
    };
    p.C_L = 0.5;
    p.C_N = 1.0;
    p.r = 0.19;
    const IftResult r = ift_solve(p);
    EXPECT_LT((Vec5(r.x) - f0_inverse(S, I).c).norm(), 1e-10);
  }
}

TEST(IftSolve, NamesViolatedHypothesis) {
  IftProblem p;
  p.F0 = Eigen::VectorXd::Constant(1, -1e-3);
  p.L = Eigen::MatrixXd::Identity(1, 1);
  p.N = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square()); };
  p.C_L = 1.0;
  p.C_N = 1.0;
  p.r = 0.05;
  auto message = [](IftProblem q) {
    try {
      ift_solve(q);
    } catch (const PreconditionError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  IftProblem q = p;
  q.C_L = 0.5;
  EXPECT_NE(message(q).find("|L^-1| <= C_L"), std::string::npos);
  q = p;
  q.r = 0.2;
  EXPECT_NE(message(q).find("r < 1/(10 C_L C_N)"), std::string::npos);
  q = p;
  q.F0[0] = -0.01;
  EXPECT_NE(message(q).find("|F(0)| <= r/(10 C_L)"), std::string::npos);
  q = p;
  q.N = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square() + 1.0); };
  EXPECT_NE(message(q).find("N(0) = 0"), std::string::npos);
  q = p;
  q.N = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(50.0 * x.array().square()); };
  EXPECT_NE(message(q).find("C_N (|x| + |y|)"), std::string::npos);
}

TEST(IftSolve, UnderstatedLipschitzConstantDiverges) {
  IftProblem p;
  p.F0 = Eigen::VectorXd::Constant(1, -0.005);
  p.L = Eigen::MatrixXd::Identity(1, 1);
  p.N = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(1000.0 * x.array().square()); };
  p.C_L = 1.0;
  p.C_N = 1.0;
  p.r = 0.05;
  IftOptions o;
  o.lipschitz_samples = 0;
  EXPECT_THROW(ift_solve(p, o), DivergenceError);
}

TEST(SelfTest, MeetsBoundsAndIsDeterministic) {
  const DonaldsonSelfTest a = donaldson_selftest(7, 200, 40);
  EXPECT_LT(a.max_roundtrip_residual, 1e-11);
  EXPECT_LE(a.max_norm_ratio, 2.0);
  EXPECT_GT(a.max_norm_ratio, 0.5);
  EXPECT_LT(a.scalar_error, 1e-14);
  EXPECT_LT(a.scalar_residual, 1e-14);
  const DonaldsonSelfTest b = donaldson_selftest(7, 200, 40);
  EXPECT_EQ(a.max_roundtrip_residual, b.max_roundtrip_residual);
  EXPECT_EQ(a.max_norm_ratio, b.max_norm_ratio);
}
