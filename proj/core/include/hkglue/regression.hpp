#pragma once

// Least-squares fit of log y = slope * log x + intercept.

#include <vector>

namespace hkglue {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n = 0;
  // Set when some y is zero/non-finite or the x values coincide; slope is NaN then.
  bool degenerate = false;
};

// PreconditionError on size mismatch, fewer than 2 points or x <= 0.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// |slope - expected| <= tol and not degenerate.
bool slope_within(const LogLogFit& f, double expected, double tol);

}  // namespace hkglue
