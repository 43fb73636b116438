#pragma once

// Single home for numerical tolerances. Values marked "algebraic" only need
// rounding headroom; "fd" values absorb finite-difference truncation.

namespace hkglue {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

namespace tol {

inline constexpr double kAlgebraic = 1e-10;
inline constexpr double kSelfDual = 1e-9;
inline constexpr double kFd = 1e-5;
inline constexpr double kGluedClosed = 1e-4;
inline constexpr double kNonHarmonicFloor = 1e-2;
inline constexpr double kRoundTrip = 1e-12;
inline constexpr double kPolarRoundTrip = 1e-12;

inline constexpr double kFdStep = 1e-4;
inline constexpr double kFdStepClosed = 1e-3;

inline constexpr double kQuadrature = 1e-10;
inline constexpr double kFluxCauchy = 1e-6;
inline constexpr int kFluxMaxPerAxis = 4096;

inline constexpr double kBisection = 1e-12;
inline constexpr double kBessel = 1e-14;
inline constexpr double kPoleProximity = 1e-8;

inline constexpr double kExponentPure = 0.2;
inline constexpr double kExponentLog = 0.3;

inline constexpr double kNewton = 1e-12;
inline constexpr int kNewtonMaxIter = 50;
inline constexpr int kNewtonMaxHalvings = 10;

inline constexpr double kNormalizedDet = 1e-10;
inline constexpr double kPeriodZero = 1e-12;

}  // namespace tol
}  // namespace hkglue
