#include "hkglue/donaldson.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "hkglue/parallel.hpp"
#include "hkglue/random.hpp"

namespace hkglue {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

const std::array<Eigen::Matrix3d, 5>& basis() {
  static const std::array<Eigen::Matrix3d, 5> e = [] {
    std::array<Eigen::Matrix3d, 5> b;
    for (auto& m : b) m.setZero();
    const double s2 = 1.0 / std::sqrt(2.0), s6 = 1.0 / std::sqrt(6.0);
    b[0].diagonal() << s2, -s2, 0.0;
    b[1].diagonal() << s6, s6, -2.0 * s6;
    b[2](0, 1) = b[2](1, 0) = s2;
    b[3](0, 2) = b[3](2, 0) = s2;
    b[4](1, 2) = b[4](2, 1) = s2;
    return b;
  }();
  return e;
}

void require_normalized(const Eigen::Matrix3d& Q, const char* who) {
  const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  const double det = Q.determinant();
  if (!(asym <= tol::kAlgebraic * std::max(1.0, Q.cwiseAbs().maxCoeff())) ||
      !(std::abs(det - 1.0) <= tol::kNormalizedDet)) {
    std::ostringstream os;
    os << who << ": Q must be symmetric with det Q = 1 (det = " << det << ", asymmetry = " << asym << ")";
    throw PreconditionError(os.str());
  }
}

Eigen::VectorXd random_direction(Rng& g, Eigen::Index n) {
  Eigen::VectorXd v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = standard_normal(g);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

Eigen::Matrix3d random_normalized_q(Rng& g, double amplitude) {
  Eigen::Matrix3d n;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) n(i, j) = uniform(g, -1.0, 1.0);
  const Eigen::Matrix3d q = Eigen::Matrix3d::Identity() + amplitude * 0.5 * (n + n.transpose());
  return q / std::cbrt(q.determinant());
}

}  // namespace

Eigen::Matrix3d SymTF3::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int k = 0; k < 5; ++k) m += c[k] * basis()[static_cast<std::size_t>(k)];
  return m;
}

SymTF3 tf(const Eigen::Matrix3d& B) {
  const Eigen::Matrix3d s = 0.5 * (B + B.transpose());
  Vec5 c;
  for (int k = 0; k < 5; ++k) c[k] = (s.array() * basis()[static_cast<std::size_t>(k)].array()).sum();
  return SymTF3(c);
}

void DefiniteTripleData::validate() const {
  if (!(dvol0 > 0)) throw PreconditionError("DefiniteTripleData: dvol0 must be positive");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > tol::kAlgebraic * std::max(1.0, Q.cwiseAbs().maxCoeff()))
    throw PreconditionError("DefiniteTripleData: Q is not symmetric");
  Eigen::LLT<Eigen::Matrix3d> llt(0.5 * (Q + Q.transpose()));
  if (llt.info() != Eigen::Success) throw PreconditionError("DefiniteTripleData: Q is not positive definite");
}

Eigen::Matrix3d DefiniteTripleData::normalized() const {
  validate();
  return Q / std::cbrt(Q.determinant());
}

double DefiniteTripleData::volume_scale() const {
  validate();
  return std::cbrt(Q.determinant()) * dvol0;
}

SymTF3 g0_map(const SymTF3& A, const Eigen::Matrix3d& Q) {
  require_normalized(Q, "g0_map");
  const Eigen::Matrix3d a = A.matrix();
  return tf(Q * a + a * Q + a * Q * a);
}

Mat5 g0_jacobian(const SymTF3& A, const Eigen::Matrix3d& Q) {
  require_normalized(Q, "g0_jacobian");
  const Eigen::Matrix3d a = A.matrix();
  Mat5 J;
  for (int k = 0; k < 5; ++k) {
    const Eigen::Matrix3d& h = basis()[static_cast<std::size_t>(k)];
    J.col(k) = tf(Q * h + h * Q + h * Q * a + a * Q * h).c;
  }
  return J;
}

SymTF3 g0_linear_inverse(const SymTF3& S, const Eigen::Matrix3d& Q) {
  const Eigen::FullPivLU<Mat5> lu(g0_jacobian(SymTF3(), Q));
  if (!lu.isInvertible()) throw NumericError("g0_linear_inverse: linearization is singular");
  return SymTF3(lu.solve(S.c));
}

SymTF3 f0_inverse(const SymTF3& S, const Eigen::Matrix3d& Q, double tol) {
  require_normalized(Q, "f0_inverse");
  SymTF3 A;
  double res = S.norm();
  for (int it = 0; it < tol::kNewtonMaxIter; ++it) {
    if (res < tol) return A;
    const Vec5 R = (g0_map(A, Q) - S).c;
    const Eigen::FullPivLU<Mat5> lu(g0_jacobian(A, Q));
    if (!lu.isInvertible()) throw NoLocalInverseError("f0_inverse: Jacobian became singular", A, res);
    const Vec5 step = lu.solve(-R);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= tol::kNewtonMaxHalvings; ++h, t *= 0.5) {
      const SymTF3 trial = A + SymTF3(step) * t;
      const double r = (g0_map(trial, Q) - S).norm();
      if (std::isfinite(r) && r < res) {
        A = trial;
        res = r;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "f0_inverse: no descent after " << tol::kNewtonMaxHalvings << " halvings at |S| = " << S.norm()
         << ", residual " << res;
      throw NoLocalInverseError(os.str(), A, res);
    }
  }
  if (res < tol) return A;
  std::ostringstream os;
  os << "f0_inverse: no convergence in " << tol::kNewtonMaxIter << " iterations, residual " << res;
  throw NoLocalInverseError(os.str(), A, res);
}

std::vector<SymTF3> f0_inverse_batch(const std::vector<SymTF3>& S, const Eigen::Matrix3d& Q, double tol) {
  require_normalized(Q, "f0_inverse_batch");
  return parallel_map(S.size(), [&](std::size_t k) { return f0_inverse(S[k], Q, tol); });
}

IftResult ift_solve(const IftProblem& p, const IftOptions& o) {
  const Eigen::Index n = p.F0.size();
  if (n == 0 || p.L.rows() != n || p.L.cols() != n || !p.N)
    throw PreconditionError("ift_solve: L must be square of the size of F0 and N must be set");
  if (!(p.C_L > 0) || !(p.C_N > 0) || !(p.r > 0))
    throw PreconditionError("ift_solve: C_L, C_N and r must be positive");

  IftResult out;
  const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(p.L).singularValues().minCoeff();
  out.inverse_norm = smin > 0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
  auto violated = [](const std::string& ineq, double lhs, double rhs) {
    std::ostringstream os;
    os << "ift_solve: hypothesis " << ineq << " violated (" << lhs << " vs " << rhs << ")";
    throw PreconditionError(os.str());
  };
  if (!(out.inverse_norm <= p.C_L * (1 + 1e-12))) violated("|L^-1| <= C_L", out.inverse_norm, p.C_L);
  if (!(p.r < 1.0 / (10 * p.C_L * p.C_N))) violated("r < 1/(10 C_L C_N)", p.r, 1.0 / (10 * p.C_L * p.C_N));
  const double f0 = p.F0.norm();
  if (!(f0 <= p.r / (10 * p.C_L))) violated("|F(0)| <= r/(10 C_L)", f0, p.r / (10 * p.C_L));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  if (const double n0 = p.N(zero).norm(); !(n0 <= 64 * kEps)) violated("N(0) = 0", n0, 0.0);

  Rng rng(o.seed);
  for (int s = 0; s < o.lipschitz_samples; ++s) {
    const double rad = 1.0 / static_cast<double>(n);
    const Eigen::VectorXd x = random_direction(rng, n) * (p.r * std::pow(uniform01(rng), rad));
    const Eigen::VectorXd y = random_direction(rng, n) * (p.r * std::pow(uniform01(rng), rad));
    const Eigen::VectorXd nx = p.N(x), ny = p.N(y);
    const double lhs = (nx - ny).norm();
    const double rhs = p.C_N * (x.norm() + y.norm()) * (x - y).norm();
    if (!(lhs <= rhs * (1 + 1e-9) + 64 * kEps * (nx.norm() + ny.norm())))
      violated("|N(x) - N(y)| <= C_N (|x| + |y|) |x - y|", lhs, rhs);
  }

  out.x = zero;
  out.residual = f0;
  if (f0 == 0.0) return out;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(p.L);
  double prev_step = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int k = 1; k <= o.max_iter; ++k) {
    const Eigen::VectorXd next = -lu.solve(p.F0 + p.N(out.x));
    const double step = (next - out.x).norm();
    out.x = next;
    out.iterations = k;
    if (!out.x.allFinite()) throw DivergenceError("ift_solve: iterate is not finite");
    if (out.x.norm() > p.r) {
      std::ostringstream os;
      os << "ift_solve: iterate left B_r at step " << k << " (|x| = " << out.x.norm() << ", r = " << p.r << ")";
      throw DivergenceError(os.str());
    }
    out.residual = (p.F0 + p.L * out.x + p.N(out.x)).norm();
    if (out.residual <= o.tol) break;
    if (step <= 4 * kEps * out.x.norm()) {
      std::ostringstream os;
      os << "ift_solve: iteration stalled at residual " << out.residual << " above tol " << o.tol;
      throw NumericError(os.str());
    }
    growing = step >= prev_step ? growing + 1 : 0;
    if (growing >= 5) {
      std::ostringstream os;
      os << "ift_solve: steps stopped contracting at iteration " << k << " (step " << step << ")";
      throw DivergenceError(os.str());
    }
    prev_step = step;
    if (k == o.max_iter) throw DivergenceError("ift_solve: no convergence within max_iter");
  }
  if (!(out.x.norm() <= 2 * p.C_L * f0 * (1 + 1e-12))) {
    std::ostringstream os;
    os << "ift_solve: |x| = " << out.x.norm() << " exceeds 2 C_L |F(0)| = " << 2 * p.C_L * f0;
    throw NumericError(os.str());
  }
  return out;
}

DonaldsonSelfTest donaldson_selftest(std::uint64_t seed, int trials, int ift_trials) {
  DonaldsonSelfTest t;
  t.trials = trials;
  t.ift_trials = ift_trials;
  Rng rng(seed);

  for (int i = 0; i < trials; ++i) {
    const Eigen::Matrix3d Q = random_normalized_q(rng, 0.05);
    const Vec5 dir = random_direction(rng, 5);
    const SymTF3 S(dir * (0.1 * uniform01(rng)));
    const SymTF3 A = f0_inverse(S, Q);
    t.max_roundtrip_residual = std::max(t.max_roundtrip_residual, (g0_map(A, Q) - S).norm());
  }

  for (int i = 0; i < ift_trials; ++i) {
    const auto n = static_cast<Eigen::Index>(1 + static_cast<int>(10 * uniform01(rng)));
    const double scale = uniform(rng, 0.5, 4.0);
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) L(a, b) += 0.3 * standard_normal(rng) / std::sqrt(static_cast<double>(n));
    L *= scale;
    // Symmetric bilinear B; |B(u, v)| <= |B|_F |u| |v| gives C_N = |B|_F.
    const double beta = uniform(rng, 0.1, 2.0);
    std::vector<Eigen::MatrixXd> B(static_cast<std::size_t>(n));
    double frob2 = 0.0;
    for (auto& m : B) {
      Eigen::MatrixXd g(n, n);
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) g(a, b) = beta * standard_normal(rng);
      m = 0.5 * (g + g.transpose());
      frob2 += m.squaredNorm();
    }
    IftProblem p;
    p.L = L;
    p.N = [B](const Eigen::VectorXd& x) {
      Eigen::VectorXd y(x.size());
      for (std::size_t i = 0; i < B.size(); ++i) y[static_cast<Eigen::Index>(i)] = x.dot(B[i] * x);
      return y;
    };
    const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(L).singularValues().minCoeff();
    p.C_L = 1.05 / smin;
    p.C_N = std::sqrt(frob2);
    p.r = 0.9 / (10 * p.C_L * p.C_N);
    p.F0 = random_direction(rng, n) * (uniform(rng, 0.05, 1.0) * p.r / (10 * p.C_L));
    IftOptions o;
    o.seed = seed + static_cast<std::uint64_t>(i);
    // Rounding of F0 + L x + N(x) scales with |L| |x|.
    o.tol = std::max(1e-14, 64 * kEps * L.norm() * p.F0.norm() * p.C_L);
    const IftResult r = ift_solve(p, o);
    t.max_norm_ratio = std::max(t.max_norm_ratio, r.x.norm() / (p.C_L * p.F0.norm()));
  }

  const double a = 1e-3;
  IftProblem s;
  s.F0 = Eigen::VectorXd::Constant(1, -a);
  s.L = Eigen::MatrixXd::Identity(1, 1);
  s.N = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square()); };
  s.C_L = 1.0;
  s.C_N = 1.0;
  s.r = 0.05;
  const IftResult r = ift_solve(s);
  // (-1 + sqrt(1 + 4a)) / 2 without the cancellation.
  const double root = 2 * a / (1 + std::sqrt(1 + 4 * a));
  t.scalar_error = std::abs(r.x[0] - root);
  t.scalar_residual = r.residual;
  return t;
}

}  // namespace hkglue
