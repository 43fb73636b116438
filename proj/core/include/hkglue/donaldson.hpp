#pragma once

// Fiberwise algebra of the hyperkaehler triple equation. A definite triple
// with pairing matrix Q becomes hyperkaehler after adding theta = A w + theta^-
// exactly when
//   TF(Q A^T + A Q + A Q A^T) = TF(-Q - S),  S_ij dvol = 1/2 theta^-_i ^ theta^-_j,
// with Q normalized to det Q = 1. G0 is the left side on trace-free symmetric
// A, F0 its local inverse near 0. ift_solve is the finite-dimensional
// quantitative implicit function theorem used to close the nonlinear system.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"

namespace hkglue {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

// Trace-free symmetric 3x3 matrix in an orthonormal basis for the Frobenius
// inner product, so |c| equals the Frobenius norm of the matrix:
//   e1 = diag(1,-1,0)/sqrt2, e2 = diag(1,1,-2)/sqrt6,
//   e3, e4, e5 = (E01+E10, E02+E20, E12+E21)/sqrt2.
struct SymTF3 {
  Vec5 c = Vec5::Zero();

  SymTF3() = default;
  explicit SymTF3(const Vec5& v) : c(v) {}

  Eigen::Matrix3d matrix() const;
  double norm() const { return c.norm(); }

  SymTF3 operator+(const SymTF3& o) const { return SymTF3(c + o.c); }
  SymTF3 operator-(const SymTF3& o) const { return SymTF3(c - o.c); }
  SymTF3 operator*(double s) const { return SymTF3(c * s); }
};

// Trace-free projection of the symmetric part of B. Idempotent.
SymTF3 tf(const Eigen::Matrix3d& B);

struct DefiniteTripleData {
  Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
  double dvol0 = 1.0;

  // PreconditionError unless Q is symmetric positive definite and dvol0 > 0.
  void validate() const;
  // det(Q)^{-1/3} Q, unit determinant.
  Eigen::Matrix3d normalized() const;
  // dvol_w / dvol_0 = det(Q)^{1/3}, times dvol0.
  double volume_scale() const;
};

// A -> TF(Q A^T + A Q + A Q A^T). PreconditionError unless Q is symmetric with
// |det Q - 1| <= 1e-10.
SymTF3 g0_map(const SymTF3& A, const Eigen::Matrix3d& Q);
// Exact Jacobian of g0_map at A in the SymTF3 coordinates.
Mat5 g0_jacobian(const SymTF3& A, const Eigen::Matrix3d& Q);
// L_Q^{-1} S with L_Q(A) = TF(Q A + A Q), the linearization at A = 0.
SymTF3 g0_linear_inverse(const SymTF3& S, const Eigen::Matrix3d& Q);

// Raised when Newton from A = 0 fails; carries the last iterate.
class NoLocalInverseError : public DivergenceError {
 public:
  NoLocalInverseError(const std::string& what, SymTF3 last, double residual)
      : DivergenceError(what), last_(std::move(last)), residual_(residual) {}
  const SymTF3& last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  SymTF3 last_;
  double residual_;
};

// Newton from A = 0 with the exact Jacobian; a step is halved (at most 10
// times) until the residual drops. Returns A with |g0_map(A, Q) - S| < tol,
// the branch continuously connected to 0.
SymTF3 f0_inverse(const SymTF3& S, const Eigen::Matrix3d& Q, double tol = tol::kNewton);
// Same over a batch; inputs are solved in parallel, results in input order.
std::vector<SymTF3> f0_inverse_batch(const std::vector<SymTF3>& S, const Eigen::Matrix3d& Q,
                                     double tol = tol::kNewton);

// F(x) = F0 + L x + N(x) with N(0) = 0.
struct IftProblem {
  Eigen::VectorXd F0;
  Eigen::MatrixXd L;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> N;
  double C_L = 1.0;
  double C_N = 1.0;
  double r = 0.0;
};

struct IftOptions {
  // Stop when |F(x)| <= tol.
  double tol = 1e-14;
  int max_iter = 200;
  // Random pairs in B_r used to spot-check the Lipschitz hypothesis on N;
  // 0 disables the check.
  int lipschitz_samples = 32;
  std::uint64_t seed = 0;
};

struct IftResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
  // 1 / smallest singular value of L.
  double inverse_norm = 0.0;
};

// Fixed-point iteration x <- -L^{-1}(F0 + N(x)) from 0. Hypotheses are checked
// first and a PreconditionError names the inequality that fails:
//   |L^{-1}| <= C_L, r < 1/(10 C_L C_N), |F0| <= r/(10 C_L), N(0) = 0,
//   |N(x) - N(y)| <= C_N (|x| + |y|) |x - y| on sampled pairs in B_r.
// DivergenceError when the steps stop shrinking for 5 iterations, the iterate
// leaves B_r or max_iter is reached. On return |x| <= 2 C_L |F0|.
IftResult ift_solve(const IftProblem& p, const IftOptions& o = {});

struct DonaldsonSelfTest {
  int trials = 0;
  int ift_trials = 0;
  // max |G0(F0(S)) - S| over the round-trip trials.
  double max_roundtrip_residual = 0.0;
  // max |x| / (C_L |F0|) over the ift trials; the inverse-function bound is 2.
  double max_norm_ratio = 0.0;
  // |x - (-1 + sqrt(1 + 4a)) / 2| for F(x) = -a + x + x^2, a = 1e-3.
  double scalar_error = 0.0;
  double scalar_residual = 0.0;
};

// Round trips on |S| <= 0.1 with Q = normalized(Id + 0.05 sym noise), random
// ift instances of dimension 1..10 and the scalar closed-form case.
DonaldsonSelfTest donaldson_selftest(std::uint64_t seed, int trials = 1000, int ift_trials = 100);

}  // namespace hkglue
