#include "hkglue/regression.hpp"

#include <cmath>
#include <limits>

#include "hkglue/errors.hpp"

namespace hkglue {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw PreconditionError("fit_loglog: x and y differ in length");
  if (x.size() < 2) throw PreconditionError("fit_loglog: need at least 2 points");
  LogLogFit f;
  f.n = static_cast<int>(x.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i])) throw PreconditionError("fit_loglog: x must be positive");
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
      f.degenerate = true;
      f.slope = f.intercept = f.r2 = nan;
      return f;
    }
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= f.n;
  my /= f.n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 1e-300) {
    f.degenerate = true;
    f.slope = f.intercept = f.r2 = nan;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // A perfectly flat y gives syy = 0; the fit is then exact.
  f.r2 = syy <= 1e-300 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

bool slope_within(const LogLogFit& f, double expected, double tol) {
  return !f.degenerate && std::abs(f.slope - expected) <= tol;
}

}  // namespace hkglue
