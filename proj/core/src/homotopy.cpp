#include "hkglue/homotopy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "hkglue/errors.hpp"

namespace hkglue {
namespace {

struct Rule {
  std::array<double, 20> x{};
  std::array<double, 20> w{};

  Rule() {
    using G = boost::math::quadrature::gauss<double, 20>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      x[k] = a[i];
      w[k++] = wt[i];
      x[k] = -a[i];
      w[k++] = wt[i];
    }
  }
};

const Rule& rule() {
  static const Rule r;
  return r;
}

// Full antisymmetric matrix of a base 2-form.
Eigen::Matrix3d as_matrix(const Alt& w) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 1) = w[0];
  m(0, 2) = w[1];
  m(1, 2) = w[2];
  return m - m.transpose();
}

// Point on the path, its velocity X and the diagonal of D phi_s at the unit
// parameter t in (0, 1), with the substitution weight.
struct PathPoint {
  Vec3 pt, X, J;
  double weight = 1.0;
};

PathPoint path(const Vec3& x, const HomotopySpec& spec, double t) {
  PathPoint q;
  switch (spec.kind) {
    case Contraction::Axis:
      q.pt = Vec3(t * x.x(), t * x.y(), x.z());
      q.X = Vec3(x.x(), x.y(), 0.0);
      q.J = Vec3(t, t, 1.0);
      break;
    case Contraction::Infinity: {
      // -w = d int_1^inf (...) ds since the pullback vanishes at s = inf;
      // s = 1/t maps (0, 1] onto [1, inf) with ds = dt / t^2 after reorienting.
      const double s = 1.0 / t;
      q.pt = Vec3(s * x.x(), s * x.y(), x.z());
      q.X = Vec3(x.x(), x.y(), 0.0);
      q.J = Vec3(s, s, 1.0);
      q.weight = -1.0 / (t * t);
      break;
    }
    case Contraction::Point:
      q.pt = spec.center + t * (x - spec.center);
      q.X = x - spec.center;
      q.J = Vec3(t, t, t);
      break;
  }
  return q;
}

Vec3 contract(const Alt& w, const PathPoint& q) {
  const Vec3 row = as_matrix(w).transpose() * q.X;  // row_j = sum_i X_i W_ij
  return q.weight * row.cwiseProduct(q.J);
}

template <std::size_t K, class Eval>
std::array<Vec3, K> composite(const Eval& w, const Vec3& x, const HomotopySpec& spec, int panels) {
  const Rule& r = rule();
  std::array<Vec3, K> sum;
  sum.fill(Vec3::Zero());
  const double hw = 0.5 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) / panels;
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      const PathPoint q = path(x, spec, mid + hw * r.x[k]);
      const std::array<Alt, K> vals = w(q.pt);
      for (std::size_t i = 0; i < K; ++i) sum[i] += r.w[k] * hw * contract(vals[i], q);
    }
  }
  return sum;
}

template <std::size_t K, class Eval>
std::array<Vec3, K> adaptive(const Eval& w, const Vec3& x, const HomotopySpec& spec, double tol, double abs_tol) {
  std::array<Vec3, K> prev = composite<K>(w, x, spec, 1);
  for (int panels = 2; panels <= 1024; panels *= 2) {
    const std::array<Vec3, K> cur = composite<K>(w, x, spec, panels);
    double diff = 0, size = 0;
    for (std::size_t i = 0; i < K; ++i) {
      diff = std::max(diff, (cur[i] - prev[i]).cwiseAbs().maxCoeff());
      size = std::max(size, cur[i].cwiseAbs().maxCoeff());
    }
    if (diff <= tol * size || diff <= abs_tol || diff < 1e-300) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "homotopy_primitive: quadrature did not settle at (" << x.x() << ", " << x.y() << ", " << x.z() << ")";
  throw NumericError(os.str());
}

}  // namespace

Vec3 homotopy_primitive(const BaseTwoForm& w, const Vec3& x, const HomotopySpec& spec, double tol,
                        double abs_tol) {
  auto one = [&w](const Vec3& y) { return std::array<Alt, 1>{w(y)}; };
  return adaptive<1>(one, x, spec, tol, abs_tol)[0];
}

std::array<Vec3, 3> homotopy_primitive3(const BaseTwoFormTriple& w, const Vec3& x, const HomotopySpec& spec,
                                        double tol, double abs_tol) {
  return adaptive<3>(w, x, spec, tol, abs_tol);
}

Alt star_gradient(const Vec3& g) {
  Alt a(3, 2);
  a[0] = g.z();
  a[1] = -g.y();
  a[2] = g.x();
  return a;
}

Alt fd_base_d(const BaseOneForm& a, const Vec3& x, double h) {
  std::array<Vec3, 3> d;
  for (int i = 0; i < 3; ++i) {
    Vec3 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    d[static_cast<std::size_t>(i)] = (a(xp) - a(xm)) / (2 * h);
  }
  // (da)_{ij} = d_i a_j - d_j a_i.
  Alt out(3, 2);
  out[0] = d[0].y() - d[1].x();
  out[1] = d[0].z() - d[2].x();
  out[2] = d[1].z() - d[2].y();
  return out;
}

}  // namespace hkglue
