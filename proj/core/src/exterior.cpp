#include "hkglue/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"

namespace hkglue {
namespace {

struct SubsetTable {
  // masks[n][k] lists k-subsets of {0..n-1} in lexicographic order.
  std::array<std::array<std::vector<int>, 5>, 5> masks;
  std::array<std::array<std::array<int, 16>, 5>, 5> slot_of;

  SubsetTable() {
    for (int n = 0; n <= 4; ++n) {
      for (int k = 0; k <= n; ++k) {
        auto& out = masks[n][k];
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
          int m = 0;
          for (int i : idx) m |= 1 << i;
          out.push_back(m);
          int pos = k - 1;
          while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
          if (pos < 0) break;
          ++idx[static_cast<std::size_t>(pos)];
          for (int j = pos + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
        slot_of[n][k].fill(-1);
        for (std::size_t s = 0; s < out.size(); ++s) slot_of[n][k][static_cast<std::size_t>(out[s])] = static_cast<int>(s);
      }
    }
  }
};

const SubsetTable& table() {
  static const SubsetTable t;
  return t;
}

int popcount(int m) { return __builtin_popcount(static_cast<unsigned>(m)); }

// Sign of the shuffle that sorts (A, B) when A and B are disjoint.
int merge_sign(int a, int b) {
  int inversions = 0;
  for (int i = 0; i < 4; ++i) {
    if (!(a & (1 << i))) continue;
    inversions += popcount(b & ((1 << i) - 1));
  }
  return (inversions % 2) ? -1 : 1;
}

std::vector<int> indices_of(int mask) {
  std::vector<int> out;
  for (int i = 0; i < 4; ++i)
    if (mask & (1 << i)) out.push_back(i);
  return out;
}

double minor_det(const SmallMatrix& m, int rows, int cols) {
  auto r = indices_of(rows);
  auto c = indices_of(cols);
  const int k = static_cast<int>(r.size());
  if (k == 0) return 1.0;
  if (k == 1) return m(r[0], c[0]);
  if (k == 2) return m(r[0], c[0]) * m(r[1], c[1]) - m(r[0], c[1]) * m(r[1], c[0]);
  SmallMatrix sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = m(r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)]);
  return sub.determinant();
}

void require_same_chart(const DifferentialForm& a, const DifferentialForm& b, const char* op) {
  if (a.chart != b.chart)
    throw StructuralError(std::string(op) + ": chart mismatch (" + chart_name(a.chart) + " vs " +
                          chart_name(b.chart) + ")");
}

ScalarEval min_clearance(const ScalarEval& a, const ScalarEval& b) {
  if (!a) return b;
  if (!b) return a;
  return [a, b](const ChartPoint& p) { return std::min(a(p), b(p)); };
}

}  // namespace

int chart_dim(ChartId chart) {
  switch (chart) {
    case ChartId::Cartesian4:
    case ChartId::Polar4:
    case ChartId::Alg4:
      return 4;
    case ChartId::Base3:
    case ChartId::PolarBase3:
      return 3;
    case ChartId::Plane2:
      return 2;
  }
  return 0;
}

std::string chart_name(ChartId chart) {
  switch (chart) {
    case ChartId::Cartesian4: return "cartesian4";
    case ChartId::Polar4: return "polar4";
    case ChartId::Base3: return "base3";
    case ChartId::PolarBase3: return "polar_base3";
    case ChartId::Alg4: return "alg4";
    case ChartId::Plane2: return "plane2";
  }
  return "unknown";
}

ChartPoint make_point(ChartId chart, std::initializer_list<double> coords) {
  if (static_cast<int>(coords.size()) != chart_dim(chart))
    throw StructuralError("make_point: expected " + std::to_string(chart_dim(chart)) + " coordinates for " +
                          chart_name(chart));
  ChartPoint p;
  p.chart = chart;
  std::copy(coords.begin(), coords.end(), p.c.begin());
  return p;
}

double reduce_angle(double angle, double period) {
  double a = std::fmod(angle, period);
  if (a < 0) a += period;
  if (a >= period) a -= period;
  return a;
}

ChartPoint to_polar(const ChartPoint& p) {
  ChartPoint q = p;
  if (p.chart == ChartId::Cartesian4) {
    q.chart = ChartId::Polar4;
  } else if (p.chart == ChartId::Base3) {
    q.chart = ChartId::PolarBase3;
  } else {
    throw StructuralError("to_polar: expected a Cartesian chart, got " + chart_name(p.chart));
  }
  const double r = std::hypot(p[0], p[1]);
  if (!(r > 0)) throw DomainError("to_polar: point on the axis r = 0");
  q[0] = r;
  q[1] = reduce_angle(std::atan2(p[1], p[0]), kTwoPi);
  return q;
}

ChartPoint to_cartesian(const ChartPoint& p) {
  ChartPoint q = p;
  if (p.chart == ChartId::Polar4) {
    q.chart = ChartId::Cartesian4;
  } else if (p.chart == ChartId::PolarBase3) {
    q.chart = ChartId::Base3;
  } else {
    throw StructuralError("to_cartesian: expected a polar chart, got " + chart_name(p.chart));
  }
  if (!(p[0] > 0)) throw DomainError("to_cartesian: polar radius must be positive");
  q[0] = p[0] * std::cos(p[1]);
  q[1] = p[0] * std::sin(p[1]);
  return q;
}

ChartPoint reduce_angles(const ChartPoint& p, double theta3_period) {
  ChartPoint q = p;
  switch (p.chart) {
    case ChartId::Polar4:
      if (!(p[0] > 0)) throw DomainError("reduce_angles: r must be positive");
      q[1] = reduce_angle(p[1], kTwoPi);
      q[2] = reduce_angle(p[2], kTwoPi);
      q[3] = reduce_angle(p[3], theta3_period);
      break;
    case ChartId::Cartesian4:
      q[2] = reduce_angle(p[2], kTwoPi);
      q[3] = reduce_angle(p[3], theta3_period);
      break;
    case ChartId::PolarBase3:
      if (!(p[0] > 0)) throw DomainError("reduce_angles: r must be positive");
      q[1] = reduce_angle(p[1], kTwoPi);
      q[2] = reduce_angle(p[2], kTwoPi);
      break;
    case ChartId::Base3:
      q[2] = reduce_angle(p[2], kTwoPi);
      break;
    default:
      throw StructuralError("reduce_angles: chart " + chart_name(p.chart) + " has no angle coordinates");
  }
  return q;
}

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Alt::Alt(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 0 || dim > 4) throw StructuralError("Alt: dimension must lie in 0..4");
  if (degree < 0 || degree > dim)
    throw StructuralError("Alt: degree " + std::to_string(degree) + " exceeds dimension " + std::to_string(dim));
  size_ = binomial(dim, degree);
}

Alt Alt::scalar(int dim, double value) {
  Alt a(dim, 0);
  a[0] = value;
  return a;
}

Alt Alt::basis(int dim, std::initializer_list<int> indices) {
  Alt a(dim, static_cast<int>(indices.size()));
  a.add(indices, 1.0);
  return a;
}

int Alt::mask(int k) const { return table().masks[dim_][degree_][static_cast<std::size_t>(k)]; }

int Alt::slot(int m) const {
  if (m < 0 || m >= 16) return -1;
  return table().slot_of[dim_][degree_][static_cast<std::size_t>(m)];
}

namespace {
// Returns (mask, sign) for an index tuple, mask = -1 when an index repeats.
std::pair<int, int> sort_indices(std::initializer_list<int> indices, int dim) {
  int buf[4];
  int n = 0;
  for (int i : indices) {
    if (i < 0 || i >= dim) throw StructuralError("Alt: index " + std::to_string(i) + " out of range");
    buf[n++] = i;
  }
  int sign = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (buf[i] == buf[j]) return {-1, 0};
      if (buf[i] > buf[j]) sign = -sign;
    }
  int m = 0;
  for (int i = 0; i < n; ++i) m |= 1 << buf[i];
  return {m, sign};
}
}  // namespace

double Alt::get(std::initializer_list<int> indices) const {
  if (static_cast<int>(indices.size()) != degree_) throw StructuralError("Alt::get: wrong number of indices");
  auto [m, sign] = sort_indices(indices, dim_);
  if (m < 0) return 0.0;
  return sign * v_[static_cast<std::size_t>(slot(m))];
}

void Alt::add(std::initializer_list<int> indices, double value) {
  if (static_cast<int>(indices.size()) != degree_) throw StructuralError("Alt::add: wrong number of indices");
  auto [m, sign] = sort_indices(indices, dim_);
  if (m < 0) return;
  v_[static_cast<std::size_t>(slot(m))] += sign * value;
}

double Alt::max_abs() const {
  double m = 0;
  for (int k = 0; k < size_; ++k) m = std::max(m, std::abs(v_[static_cast<std::size_t>(k)]));
  return m;
}

Alt& Alt::operator+=(const Alt& o) {
  if (o.dim_ != dim_ || o.degree_ != degree_) throw StructuralError("Alt: adding forms of different shape");
  for (int k = 0; k < size_; ++k) v_[static_cast<std::size_t>(k)] += o.v_[static_cast<std::size_t>(k)];
  return *this;
}

Alt& Alt::operator-=(const Alt& o) {
  if (o.dim_ != dim_ || o.degree_ != degree_) throw StructuralError("Alt: subtracting forms of different shape");
  for (int k = 0; k < size_; ++k) v_[static_cast<std::size_t>(k)] -= o.v_[static_cast<std::size_t>(k)];
  return *this;
}

Alt& Alt::operator*=(double s) {
  for (int k = 0; k < size_; ++k) v_[static_cast<std::size_t>(k)] *= s;
  return *this;
}

Alt operator+(Alt a, const Alt& b) { return a += b; }
Alt operator-(Alt a, const Alt& b) { return a -= b; }
Alt operator*(double s, Alt a) { return a *= s; }
Alt operator*(Alt a, double s) { return a *= s; }

Alt wedge(const Alt& a, const Alt& b) {
  if (a.dim() != b.dim()) throw StructuralError("wedge: dimension mismatch");
  if (a.degree() + b.degree() > a.dim())
    throw StructuralError("wedge: degree " + std::to_string(a.degree() + b.degree()) + " exceeds dimension " +
                          std::to_string(a.dim()));
  Alt out(a.dim(), a.degree() + b.degree());
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const int ma = a.mask(i);
    for (int j = 0; j < b.size(); ++j) {
      const int mb = b.mask(j);
      if (ma & mb) continue;
      out[out.slot(ma | mb)] += merge_sign(ma, mb) * a[i] * b[j];
    }
  }
  return out;
}

double min_eigenvalue(const SmallMatrix& g) {
  Eigen::SelfAdjointEigenSolver<SmallMatrix> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {
void check_metric(const SmallMatrix& g, int dim, const char* op) {
  if (g.rows() != dim || g.cols() != dim) throw StructuralError(std::string(op) + ": metric has wrong size");
  Eigen::LLT<SmallMatrix> llt(g);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << op << ": metric not positive definite (smallest eigenvalue " << min_eigenvalue(g) << ")";
    throw NumericError(os.str());
  }
}
}  // namespace

double inner(const Alt& a, const Alt& b, const SmallMatrix& g) {
  if (a.dim() != b.dim() || a.degree() != b.degree()) throw StructuralError("inner: shape mismatch");
  check_metric(g, a.dim(), "inner");
  const SmallMatrix ginv = g.inverse();
  double s = 0;
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < b.size(); ++j) {
      if (b[j] == 0.0) continue;
      s += a[i] * b[j] * minor_det(ginv, a.mask(i), b.mask(j));
    }
  }
  return s;
}

double norm(const Alt& a, const SmallMatrix& g) { return std::sqrt(std::max(0.0, inner(a, a, g))); }

Alt hodge(const Alt& a, const SmallMatrix& g, int orientation) {
  const int n = a.dim();
  const int k = a.degree();
  check_metric(g, n, "hodge");
  const SmallMatrix ginv = g.inverse();
  const double vol = orientation * std::sqrt(g.determinant());
  const int full = (1 << n) - 1;
  Alt out(n, n - k);
  for (int i = 0; i < a.size(); ++i) {
    // Raised component a^I = sum_J det(ginv[I, J]) a_J.
    const int mi = a.mask(i);
    double raised = 0;
    for (int j = 0; j < a.size(); ++j) raised += minor_det(ginv, mi, a.mask(j)) * a[j];
    const int comp = full & ~mi;
    out[out.slot(comp)] += vol * merge_sign(mi, comp) * raised;
  }
  return out;
}

Alt pullback(const Alt& a, const SmallMatrix& jac) {
  if (jac.rows() != a.dim()) throw StructuralError("pullback: Jacobian rows must match the target dimension");
  const int n = static_cast<int>(jac.cols());
  if (a.degree() > n) throw StructuralError("pullback: degree exceeds source dimension");
  Alt out(n, a.degree());
  for (int i = 0; i < out.size(); ++i) {
    double s = 0;
    for (int j = 0; j < a.size(); ++j)
      if (a[j] != 0.0) s += a[j] * minor_det(jac, a.mask(j), out.mask(i));
    out[i] = s;
  }
  return out;
}

Alt DifferentialForm::operator()(const ChartPoint& p) const {
  if (p.chart != chart)
    throw StructuralError("form evaluated on chart " + chart_name(p.chart) + " but defined on " + chart_name(chart));
  Alt v = eval(p);
  if (v.degree() != degree || v.dim() != dim()) throw StructuralError("form evaluator returned wrong shape");
  return v;
}

DifferentialForm constant_form(ChartId chart, const Alt& value) {
  if (value.dim() != chart_dim(chart)) throw StructuralError("constant_form: dimension mismatch");
  DifferentialForm f;
  f.chart = chart;
  f.degree = value.degree();
  f.eval = [value](const ChartPoint&) { return value; };
  f.exact_d = [value](const ChartPoint&) {
    if (value.degree() == value.dim()) throw StructuralError("d of a top-degree form");
    return Alt(value.dim(), value.degree() + 1);
  };
  return f;
}

DifferentialForm scalar_field(ChartId chart, ScalarEval fn) {
  DifferentialForm f;
  f.chart = chart;
  f.degree = 0;
  const int n = chart_dim(chart);
  f.eval = [fn, n](const ChartPoint& p) { return Alt::scalar(n, fn(p)); };
  return f;
}

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_chart(a, b, "add");
  if (a.degree != b.degree) throw StructuralError("add: degree mismatch");
  DifferentialForm f;
  f.chart = a.chart;
  f.degree = a.degree;
  f.eval = [a, b](const ChartPoint& p) { return a(p) + b(p); };
  if (a.exact_d && b.exact_d) f.exact_d = [a, b](const ChartPoint& p) { return a.exact_d(p) + b.exact_d(p); };
  f.clearance = min_clearance(a.clearance, b.clearance);
  return f;
}

DifferentialForm operator*(double s, const DifferentialForm& a) {
  DifferentialForm f = a;
  f.eval = [a, s](const ChartPoint& p) { return s * a(p); };
  if (a.exact_d) f.exact_d = [a, s](const ChartPoint& p) { return s * a.exact_d(p); };
  return f;
}

DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) { return a + (-1.0) * b; }

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_chart(a, b, "wedge");
  if (a.degree + b.degree > a.dim())
    throw StructuralError("wedge: degree " + std::to_string(a.degree + b.degree) + " exceeds dimension");
  DifferentialForm f;
  f.chart = a.chart;
  f.degree = a.degree + b.degree;
  f.eval = [a, b](const ChartPoint& p) { return wedge(a(p), b(p)); };
  if (a.exact_d && b.exact_d && f.degree < a.dim()) {
    const double sign = (a.degree % 2) ? -1.0 : 1.0;
    f.exact_d = [a, b, sign](const ChartPoint& p) {
      return wedge(a.exact_d(p), b(p)) + sign * wedge(a(p), b.exact_d(p));
    };
  }
  f.clearance = min_clearance(a.clearance, b.clearance);
  return f;
}

Alt fd_derivative_at(const DifferentialForm& f, const ChartPoint& p, double h) {
  if (!(h > 0)) throw PreconditionError("exterior_derivative: step must be positive");
  if (f.degree >= f.dim()) throw StructuralError("exterior_derivative: degree already maximal");
  if (f.clearance) {
    const double c = f.clearance(p);
    if (c < 2 * h) {
      std::ostringstream os;
      os << "exterior_derivative: stencil of step " << h << " within " << c << " of an excluded locus";
      throw DomainError(os.str());
    }
  }
  const int n = f.dim();
  std::array<Alt, 4> partial;
  for (int i = 0; i < n; ++i) {
    ChartPoint a = p, b = p;
    a[i] += h;
    b[i] -= h;
    partial[static_cast<std::size_t>(i)] = (f(a) - f(b)) * (0.5 / h);
  }
  // (df)_I = sum_i dx^i ^ d_i f, assembled through the basis wedge.
  Alt out(n, f.degree + 1);
  for (int i = 0; i < n; ++i) {
    Alt dxi(n, 1);
    dxi[i] = 1.0;
    out += wedge(dxi, partial[static_cast<std::size_t>(i)]);
  }
  return out;
}

DifferentialForm fd_exterior_derivative(const DifferentialForm& f, double h) {
  DifferentialForm d;
  d.chart = f.chart;
  d.degree = f.degree + 1;
  if (d.degree > f.dim()) throw StructuralError("exterior_derivative: degree already maximal");
  d.eval = [f, h](const ChartPoint& p) { return fd_derivative_at(f, p, h); };
  if (f.clearance) d.clearance = [f, h](const ChartPoint& p) { return f.clearance(p) - h; };
  return d;
}

DifferentialForm exterior_derivative(const DifferentialForm& f, double h) {
  if (!f.exact_d) return fd_exterior_derivative(f, h);
  DifferentialForm d;
  d.chart = f.chart;
  d.degree = f.degree + 1;
  if (d.degree > f.dim()) throw StructuralError("exterior_derivative: degree already maximal");
  d.eval = f.exact_d;
  d.clearance = f.clearance;
  if (d.degree < f.dim()) {
    const int n = f.dim();
    const int k = d.degree + 1;
    d.exact_d = [n, k](const ChartPoint&) { return Alt(n, k); };
  }
  return d;
}

SmallMatrix MetricField::operator()(const ChartPoint& p) const {
  if (p.chart != chart) throw StructuralError("metric evaluated on the wrong chart");
  SmallMatrix g = eval(p);
  const int n = chart_dim(chart);
  if (g.rows() != n || g.cols() != n) throw StructuralError("metric evaluator returned wrong size");
  const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff())) throw NumericError("metric is not symmetric");
  const double lmin = min_eigenvalue(g);
  if (!(lmin > 0)) {
    std::ostringstream os;
    os << "metric degenerate at point: smallest eigenvalue " << lmin;
    throw NumericError(os.str());
  }
  return g;
}

MetricField flat_metric(ChartId chart) {
  MetricField m;
  m.chart = chart;
  const int n = chart_dim(chart);
  m.eval = [n](const ChartPoint&) { return SmallMatrix::Identity(n, n); };
  return m;
}

MetricField flat_polar_base_metric() {
  MetricField m;
  m.chart = ChartId::PolarBase3;
  m.eval = [](const ChartPoint& p) {
    SmallMatrix g = SmallMatrix::Identity(3, 3);
    g(1, 1) = p[0] * p[0];
    return g;
  };
  return m;
}

DifferentialForm hodge_star(const DifferentialForm& f, const MetricField& g) {
  if (f.chart != g.chart) throw StructuralError("hodge_star: chart mismatch");
  DifferentialForm out;
  out.chart = f.chart;
  out.degree = f.dim() - f.degree;
  out.eval = [f, g](const ChartPoint& p) { return hodge(f(p), g(p), g.orientation); };
  out.clearance = f.clearance;
  return out;
}

DifferentialForm pullback(const DifferentialForm& f, const ChartMap& F) {
  if (F.to != f.chart) throw StructuralError("pullback: map target chart differs from the form's chart");
  DifferentialForm out;
  out.chart = F.from;
  out.degree = f.degree;
  out.eval = [f, F](const ChartPoint& p) { return pullback(f(F.map(p)), F.jacobian(p)); };
  if (f.clearance) out.clearance = [f, F](const ChartPoint& p) { return f.clearance(F.map(p)); };
  return out;
}

}  // namespace hkglue
