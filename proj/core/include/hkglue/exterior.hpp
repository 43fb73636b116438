#pragma once

// Pointwise exterior calculus on small coordinate charts (dimension <= 4).
//
// An Alt is an alternating covector at one point: components are stored for
// strictly increasing index tuples in lexicographic order, so dx^0^dx^2 in
// dimension 4 lives in slot 1 of {01,02,03,12,13,23}. A DifferentialForm is a
// chart-local evaluator returning Alts. Identifications between charts (deck
// transformations, the involution) are explicit ChartMaps, never implicit.

#include <array>
#include <functional>
#include <initializer_list>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

namespace hkglue {

// (x, y, theta2, theta3): Cartesian base plane times the two circle angles.
// (r, theta1, theta2, theta3): polar version with x + iy = r e^{i theta1}.
// Base3 / PolarBase3: the three-dimensional base Q = R^2 x S^1.
// Alg4: (Re U, Im U, Re V, Im V) on the flat ALG model.
enum class ChartId { Cartesian4, Polar4, Base3, PolarBase3, Alg4, Plane2 };

int chart_dim(ChartId chart);
std::string chart_name(ChartId chart);

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

struct ChartPoint {
  ChartId chart = ChartId::Cartesian4;
  std::array<double, 4> c{};

  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
};

ChartPoint make_point(ChartId chart, std::initializer_list<double> coords);

// Reduce an angle into [0, period).
double reduce_angle(double angle, double period);

// Polar <-> Cartesian on the 4D and 3D charts. theta1 lands in [0, 2pi).
// Converting a point with r <= 0 to or from polar form throws DomainError.
ChartPoint to_polar(const ChartPoint& p);
ChartPoint to_cartesian(const ChartPoint& p);

// Reduce the angle coordinates of a polar or Cartesian GH point to their
// fundamental domains: theta1, theta2 in [0, 2pi), theta3 in [0, theta3_period).
ChartPoint reduce_angles(const ChartPoint& p, double theta3_period);

class Alt {
 public:
  static constexpr int kMaxComponents = 6;

  Alt() = default;
  Alt(int dim, int degree);

  static Alt scalar(int dim, double value);
  // Signed basis element dx^{i0} ^ dx^{i1} ^ ...; repeated indices give 0.
  static Alt basis(int dim, std::initializer_list<int> indices);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return size_; }

  double operator[](int k) const { return v_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return v_[static_cast<std::size_t>(k)]; }

  // Bitmask of coordinate indices carried by slot k.
  int mask(int k) const;
  // Slot holding the sorted subset `mask`, or -1.
  int slot(int mask) const;

  // Signed component for an arbitrary index tuple (antisymmetric access).
  double get(std::initializer_list<int> indices) const;
  // Adds value * dx^{indices} respecting the ordering sign.
  void add(std::initializer_list<int> indices, double value);

  double max_abs() const;

  Alt& operator+=(const Alt& o);
  Alt& operator-=(const Alt& o);
  Alt& operator*=(double s);

 private:
  int dim_ = 0;
  int degree_ = 0;
  int size_ = 1;
  std::array<double, kMaxComponents> v_{};
};

Alt operator+(Alt a, const Alt& b);
Alt operator-(Alt a, const Alt& b);
Alt operator*(double s, Alt a);
Alt operator*(Alt a, double s);

// Number of k-subsets of n.
int binomial(int n, int k);

Alt wedge(const Alt& a, const Alt& b);

// Hodge star with respect to the inner product g (positive definite) and the
// orientation sign; star(1) is orientation * sqrt(det g) dx^0^...^dx^{n-1}.
Alt hodge(const Alt& a, const SmallMatrix& g, int orientation = 1);

// Induced inner product of k-covectors; |a|_g = sqrt(inner(a, a, g)).
double inner(const Alt& a, const Alt& b, const SmallMatrix& g);
double norm(const Alt& a, const SmallMatrix& g);

// Pullback through a linear map with Jacobian J (rows: target coordinates,
// columns: source coordinates).
Alt pullback(const Alt& a, const SmallMatrix& jacobian);

using FormEval = std::function<Alt(const ChartPoint&)>;
using ScalarEval = std::function<double(const ChartPoint&)>;

struct DifferentialForm {
  ChartId chart = ChartId::Cartesian4;
  int degree = 0;
  FormEval eval;
  // Closed-form exterior derivative; when set it overrides finite differences.
  FormEval exact_d;
  // Distance to the nearest excluded locus (pole, axis, chart edge).
  ScalarEval clearance;

  int dim() const { return chart_dim(chart); }
  Alt operator()(const ChartPoint& p) const;
};

DifferentialForm constant_form(ChartId chart, const Alt& value);
DifferentialForm scalar_field(ChartId chart, ScalarEval f);

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm operator*(double s, const DifferentialForm& a);
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

// Central-difference derivative at one point. Throws DomainError when the
// stencil would come within 2h of the form's excluded locus.
Alt fd_derivative_at(const DifferentialForm& f, const ChartPoint& p, double h);

// d f: uses exact_d when present, otherwise central differences with step h.
DifferentialForm exterior_derivative(const DifferentialForm& f, double h);
// d f by finite differences only (independent cross-check of exact_d).
DifferentialForm fd_exterior_derivative(const DifferentialForm& f, double h);

struct MetricField {
  ChartId chart = ChartId::Cartesian4;
  std::function<SmallMatrix(const ChartPoint&)> eval;
  int orientation = 1;

  // Evaluates and validates: symmetric and positive definite, otherwise
  // NumericError with the smallest eigenvalue in the message.
  SmallMatrix operator()(const ChartPoint& p) const;
};

MetricField flat_metric(ChartId chart);
// dr^2 + r^2 dtheta1^2 + dtheta2^2 on PolarBase3.
MetricField flat_polar_base_metric();

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const SmallMatrix& g);

DifferentialForm hodge_star(const DifferentialForm& f, const MetricField& g);

struct ChartMap {
  ChartId from = ChartId::Cartesian4;
  ChartId to = ChartId::Cartesian4;
  std::function<ChartPoint(const ChartPoint&)> map;
  std::function<SmallMatrix(const ChartPoint&)> jacobian;
};

// (F^* f)(p) = J(p)^T f(F(p)).
DifferentialForm pullback(const DifferentialForm& f, const ChartMap& F);

}  // namespace hkglue
