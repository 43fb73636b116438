#pragma once

// Homotopy (radial) primitives for closed 2-forms on the base Q.
//
// For a contraction phi_s and closed w, the 1-form
//   (K w)_x(v) = int w(phi_s x)(d/ds phi_s x, D phi_s v) ds
// satisfies dKw = w wherever the swept region avoids the singular set.
// Base 2-forms are Alt(3, 2) with slots (dx^dy, dx^dtheta2, dy^dtheta2);
// 1-forms are returned as (eta_x, eta_y, eta_theta2).

#include <array>
#include <functional>

#include "hkglue/constants.hpp"
#include "hkglue/exterior.hpp"
#include "hkglue/greens.hpp"

namespace hkglue {

using BaseTwoForm = std::function<Alt(const Vec3&)>;
using BaseOneForm = std::function<Vec3(const Vec3&)>;
using BaseTwoFormTriple = std::function<std::array<Alt, 3>(const Vec3&)>;

enum class Contraction {
  // phi_s(x, y, t) = (s x, s y, t), s in [0, 1]; needs w smooth up to the axis.
  Axis,
  // Same scaling with s in [1, inf); primitive vanishes at infinity, needs
  // planar coefficients of w to decay faster than r^-2.
  Infinity,
  // phi_s(x) = c + s (x - c), s in [0, 1].
  Point,
};

struct HomotopySpec {
  Contraction kind = Contraction::Axis;
  Vec3 center = Vec3::Zero();
};

// Composite 20-point Gauss-Legendre, panel count doubled until successive
// results agree to tol (relative) or abs_tol (absolute); NumericError after
// 1024 panels. abs_tol covers integrands whose size sits near their own
// rounding floor (multipole tails).
Vec3 homotopy_primitive(const BaseTwoForm& w, const Vec3& x, const HomotopySpec& spec,
                        double tol = tol::kQuadrature, double abs_tol = 0.0);
// Three primitives along shared paths; the tolerance applies to the largest.
std::array<Vec3, 3> homotopy_primitive3(const BaseTwoFormTriple& w, const Vec3& x, const HomotopySpec& spec,
                                        double tol = tol::kQuadrature, double abs_tol = 0.0);

// Hodge star of a gradient on flat Q: star dV = V_x dy^dt - V_y dx^dt + V_t dx^dy.
Alt star_gradient(const Vec3& grad);

// Exterior derivative of a base 1-form, by central differences.
Alt fd_base_d(const BaseOneForm& a, const Vec3& x, double h);

}  // namespace hkglue
