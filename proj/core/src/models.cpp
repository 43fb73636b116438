#include "hkglue/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"
#include "hkglue/random.hpp"

namespace hkglue {
namespace {

const std::complex<double> kRho = std::polar(1.0, kTwoPi / 3.0);
const std::complex<double> kI{0.0, 1.0};

SmallMatrix identity4() { return SmallMatrix::Identity(4, 4); }

ChartMap polar_self_map(std::function<ChartPoint(const ChartPoint&)> f, SmallMatrix J) {
  ChartMap m;
  m.from = ChartId::Polar4;
  m.to = ChartId::Polar4;
  m.map = std::move(f);
  m.jacobian = [J](const ChartPoint&) { return J; };
  return m;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("model config: " + key + " is not a number: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("model config: trailing characters in " + key + ": '" + v + "'");
  return x;
}

// Accepts "p/q" as well as decimals, so table values can be written exactly.
double parse_beta(const std::string& v) {
  const auto slash = v.find('/');
  if (slash == std::string::npos) return parse_real("beta", v);
  const double den = parse_real("beta", trim(v.substr(slash + 1)));
  if (den == 0.0) throw ConfigError("model config: beta has a zero denominator");
  return parse_real("beta", trim(v.substr(0, slash))) / den;
}

std::complex<double> parse_tau(const std::string& v) {
  if (v == "i") return kI;
  if (v == "rho") return kRho;
  const auto comma = v.find(',');
  if (comma == std::string::npos) throw ConfigError("model config: tau must be 're,im', 'i' or 'rho'");
  return {parse_real("tau", trim(v.substr(0, comma))), parse_real("tau", trim(v.substr(comma + 1)))};
}

}  // namespace

const std::vector<AlgTableRow>& alg_table() {
  static const std::vector<AlgTableRow> rows{
      {"I0*", 1.0 / 2.0, std::nullopt, 5}, {"II", 1.0 / 6.0, kRho, 9}, {"II*", 5.0 / 6.0, kRho, 1},
      {"III", 1.0 / 4.0, kI, 8},           {"III*", 3.0 / 4.0, kI, 2},  {"IV", 1.0 / 3.0, kRho, 7},
      {"IV*", 2.0 / 3.0, kRho, 3},
  };
  return rows;
}

const AlgTableRow& alg_row_by_tag(const std::string& tag) {
  for (const auto& r : alg_table())
    if (r.tag == tag) return r;
  throw ConfigError("ALG: unknown fiber tag '" + tag + "'");
}

const AlgTableRow& alg_row_by_beta(double beta) {
  for (const auto& r : alg_table())
    if (std::abs(r.beta - beta) < 1e-12) return r;
  std::ostringstream os;
  os << "ALG: beta = " << beta << " is not in the table";
  throw ConfigError(os.str());
}

void ALGParams::validate() const {
  const AlgTableRow& row = alg_row_by_tag(tag);
  if (std::abs(row.beta - beta) > 1e-12) throw ConfigError("ALG: beta does not match the table row for " + tag);
  if (!(tau.imag() > 0)) throw ConfigError("ALG: Im tau must be positive");
  if (row.tau && std::abs(*row.tau - tau) > 1e-12) throw ConfigError("ALG: tau does not match the table row for " + tag);
  if (!(L > 0)) throw ConfigError("ALG: L must be positive");
  if (!(R > 0)) throw ConfigError("ALG: R must be positive");
}

ALGParams make_alg_params(const std::string& tag, double L, double R, std::optional<std::complex<double>> tau) {
  const AlgTableRow& row = alg_row_by_tag(tag);
  ALGParams p;
  p.tag = row.tag;
  p.beta = row.beta;
  if (row.tau) {
    p.tau = tau.value_or(*row.tau);
  } else {
    if (!tau) throw ConfigError("ALG: I0* needs an explicit tau");
    p.tau = *tau;
  }
  p.L = L;
  p.R = R;
  p.validate();
  return p;
}

double ALGStarParams::r_min() const { return std::exp(kPi / nu * (1.0 - kappa0)); }

void ALGStarParams::validate() const {
  if (nu < 1) throw ConfigError("ALG*: nu must be a positive integer");
  if (!(L > 0)) throw ConfigError("ALG*: L must be positive");
  if (!(R > r_min())) {
    std::ostringstream os;
    os << "ALG*: R = " << R << " must exceed e^{(pi/nu)(1 - kappa0)} = " << r_min();
    throw ConfigError(os.str());
  }
}

HKTripleField alg_model_triple(const ALGParams& p) {
  p.validate();
  HKTripleField t;
  t.chart = ChartId::Alg4;
  t.sample = [](const ChartPoint& x) {
    if (x.chart != ChartId::Alg4) throw StructuralError("ALG triple lives on the alg4 chart");
    HKSample s;
    s.omega[0] = Alt::basis(4, {0, 1}) + Alt::basis(4, {2, 3});
    s.omega[1] = Alt::basis(4, {0, 2}) - Alt::basis(4, {1, 3});
    s.omega[2] = Alt::basis(4, {0, 3}) + Alt::basis(4, {1, 2});
    s.volume = Alt::basis(4, {0, 1, 2, 3});
    s.metric = identity4();
    return s;
  };
  return t;
}

double alg_fiber_area(const ALGParams& p, int grid) {
  const HKTripleField t = alg_model_triple(p);
  // V = L (s + t tau), (s, t) in [0, 1]^2, at a fixed U outside radius R.
  SmallMatrix J = SmallMatrix::Zero(4, 2);
  J(2, 0) = p.L;
  J(2, 1) = p.L * p.tau.real();
  J(3, 1) = p.L * p.tau.imag();
  const double h = 1.0 / grid;
  double area = 0.0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double s = (i + 0.5) * h, u = (j + 0.5) * h;
      const ChartPoint x = make_point(ChartId::Alg4, {2.0 * p.R, 0.0, p.L * (s + u * p.tau.real()), p.L * u * p.tau.imag()});
      area += pullback(t.sample(x).omega[0], J)[0] * h * h;
    }
  return area;
}

ChartMap alg_sector_map(const ALGParams& p) {
  const double a = kTwoPi * p.beta;
  const double c = std::cos(a), s = std::sin(a);
  SmallMatrix J = SmallMatrix::Zero(4, 4);
  J(0, 0) = c;
  J(0, 1) = -s;
  J(1, 0) = s;
  J(1, 1) = c;
  J(2, 2) = c;
  J(2, 3) = s;
  J(3, 2) = -s;
  J(3, 3) = c;
  ChartMap m;
  m.from = ChartId::Alg4;
  m.to = ChartId::Alg4;
  m.map = [J](const ChartPoint& x) {
    Eigen::Vector4d v(x[0], x[1], x[2], x[3]);
    const Eigen::Vector4d w = J * v;
    return make_point(ChartId::Alg4, {w[0], w[1], w[2], w[3]});
  };
  m.jacobian = [J](const ChartPoint&) { return J; };
  return m;
}

ChartPoint alg_reduce(const ALGParams& p, const ChartPoint& x) {
  std::complex<double> U(x[0], x[1]), V(x[2], x[3]);
  if (std::abs(U) <= 0.0) throw DomainError("alg_reduce: U = 0 has no sector representative");
  const std::complex<double> g = std::polar(1.0, kTwoPi * p.beta);
  const double width = kTwoPi * p.beta;
  for (int k = 0; k < 12; ++k) {
    double arg = std::arg(U);
    if (arg < 0) arg += kTwoPi;
    if (arg < width - 1e-15) break;
    U *= g;
    V /= g;
  }
  // Reduce V = L (a + b tau) to a, b in [0, 1).
  const std::complex<double> w = V / p.L;
  const double bcoef = w.imag() / p.tau.imag();
  const double acoef = w.real() - bcoef * p.tau.real();
  const double a = acoef - std::floor(acoef), b = bcoef - std::floor(bcoef);
  V = p.L * (a + b * p.tau);
  return make_point(ChartId::Alg4, {U.real(), U.imag(), V.real(), V.imag()});
}

HKTripleField algstar_model_triple(const ALGStarParams& p) {
  p.validate();
  const HKTripleField base = build_gh_triple(model_potential(p.nu, p.kappa0), model_connection(p.nu), p.L);
  HKTripleField t = base;
  const double R = p.R;
  t.sample = [base, R](const ChartPoint& x) {
    const double r = std::hypot(x[0], x[1]);
    if (!(r > R)) {
      std::ostringstream os;
      os << "ALG* model: r = " << r << " is not beyond R = " << R;
      throw DomainError(os.str());
    }
    return base.sample(x);
  };
  t.clearance = [R](const ChartPoint& x) { return std::hypot(x[0], x[1]) - R; };
  return t;
}

ChartMap polar_to_cartesian_map() {
  ChartMap m;
  m.from = ChartId::Polar4;
  m.to = ChartId::Cartesian4;
  m.map = [](const ChartPoint& p) {
    return make_point(ChartId::Cartesian4, {p[0] * std::cos(p[1]), p[0] * std::sin(p[1]), p[2], p[3]});
  };
  m.jacobian = [](const ChartPoint& p) {
    SmallMatrix J = identity4();
    J(0, 0) = std::cos(p[1]);
    J(0, 1) = -p[0] * std::sin(p[1]);
    J(1, 0) = std::sin(p[1]);
    J(1, 1) = p[0] * std::cos(p[1]);
    return J;
  };
  return m;
}

HKTripleField algstar_model_triple_polar(const ALGStarParams& p) {
  HKTripleField t = pullback_triple(algstar_model_triple(p), polar_to_cartesian_map());
  const double R = p.R;
  t.clearance = [R](const ChartPoint& x) { return x[0] - R; };
  return t;
}

HKTripleField algstar_rescaled_triple(const ALGStarParams& p, double lambda) {
  if (!(lambda > 0)) throw PreconditionError("algstar_rescaled_triple: lambda must be positive");
  ALGStarParams q = p;
  q.L = lambda;
  ChartMap m;
  m.from = ChartId::Cartesian4;
  m.to = ChartId::Cartesian4;
  m.map = [lambda](const ChartPoint& x) {
    return make_point(ChartId::Cartesian4, {x[0] / lambda, x[1] / lambda, x[2], x[3]});
  };
  SmallMatrix J = identity4();
  J(0, 0) = J(1, 1) = 1.0 / lambda;
  m.jacobian = [J](const ChartPoint&) { return J; };
  return pullback_triple(algstar_model_triple(q), m);
}

std::complex<double> algstar_holomorphic_coordinate(const ChartPoint& p) {
  if (p.chart == ChartId::Polar4) return std::polar(p[0] * p[0], 2.0 * p[1]);
  const std::complex<double> z(p[0], p[1]);
  return z * z;
}

ChartMap deck_sigma1() {
  return polar_self_map([](const ChartPoint& p) { return make_point(ChartId::Polar4, {p[0], p[1] + kTwoPi, p[2], p[3]}); },
                        identity4());
}

ChartMap deck_sigma2() {
  SmallMatrix J = identity4();
  J(3, 1) = kTwoPi;
  return polar_self_map(
      [](const ChartPoint& p) { return make_point(ChartId::Polar4, {p[0], p[1], p[2] + kTwoPi, p[3] + kTwoPi * p[1]}); }, J);
}

ChartMap deck_sigma3(int nu) {
  if (nu < 1) throw PreconditionError("deck_sigma3: nu must be positive");
  const double shift = 2.0 * kPi * kPi / nu;
  return polar_self_map(
      [shift](const ChartPoint& p) { return make_point(ChartId::Polar4, {p[0], p[1], p[2], p[3] + shift}); }, identity4());
}

ChartMap involution_iota() {
  SmallMatrix J = identity4();
  J(2, 2) = J(3, 3) = -1.0;
  return polar_self_map([](const ChartPoint& p) { return make_point(ChartId::Polar4, {p[0], p[1] + kPi, -p[2], -p[3]}); },
                        J);
}

HarmonicPotential semiflat_potential(double T, int b, const HoloSeries& h, double lambda, double lambda_tilde) {
  if (!(lambda > 0) || !(lambda_tilde > 0)) throw PreconditionError("semiflat_potential: lambda must be positive");
  const double sb = b / kPi, a = lambda_tilde * lambda;
  HarmonicPotential V;
  V.value = [T, sb, h, lambda, a](const Vec3& x) {
    const double r = std::hypot(x.x(), x.y());
    if (!(r > 0)) throw DomainError("semiflat_potential: point on the axis r = 0");
    return T - sb * std::log(lambda * r) + h(a * std::complex<double>(x.x(), x.y())).imag();
  };
  V.gradient = [sb, h, a](const Vec3& x) {
    const double r2 = x.x() * x.x() + x.y() * x.y();
    if (!(r2 > 0)) throw DomainError("semiflat_potential: point on the axis r = 0");
    const std::complex<double> hp = a * h.derivative(a * std::complex<double>(x.x(), x.y()));
    return Vec3(-sb * x.x() / r2 + hp.imag(), -sb * x.y() / r2 + hp.real(), 0.0);
  };
  V.singular_axis = true;
  V.exterior_slope = -sb;
  V.T = T;
  V.name = "semiflat";
  return V;
}

HarmonicPotential semiflat_potential(const NeckPotentialParams& p) {
  return semiflat_potential(p.T(), p.b, p.h, p.lambda, p.lambda_tilde());
}

Vec3 GaugeFunction::grad(double r, double t1, double t2) const {
  if (gradient) return gradient(r, t1, t2);
  constexpr double h = 1e-5;
  return Vec3((value(r + h, t1, t2) - value(r - h, t1, t2)) / (2 * h),
              (value(r, t1 + h, t2) - value(r, t1 - h, t2)) / (2 * h),
              (value(r, t1, t2 + h) - value(r, t1, t2 - h)) / (2 * h));
}

LocalConnection twisted_connection(int nu, const GaugeFunction& f, double q) {
  LocalConnection ref = model_connection(nu);
  const double s = nu / kPi;
  LocalConnection conn = ref;
  conn.A = [ref, f, q, s](const Vec3& x) {
    const double r2 = x.x() * x.x() + x.y() * x.y(), r = std::sqrt(r2);
    const Vec3 g = f.grad(r, std::atan2(x.y(), x.x()), x.z());
    // df = f_r (x dx + y dy)/r + f_t1 (x dy - y dx)/r^2 + f_t2 dtheta2.
    const Vec3 df(g.x() * x.x() / r - g.y() * x.y() / r2, g.x() * x.y() / r + g.y() * x.x() / r2, g.z());
    return (ref.A(x) + s * (df + Vec3(0.0, 0.0, q))).eval();
  };
  conn.strategy = "twisted";
  return conn;
}

GaugeNormalization gauge_normalize(const GaugeFunction& f, double q, int samples, std::uint64_t seed) {
  if (!f.value) throw PreconditionError("gauge_normalize: missing gauge function");
  std::mt19937_64 rng(seed);
  double c = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = uniform(rng, 0.5, 50.0), t1 = uniform(rng, 0.0, kTwoPi), t2 = uniform(rng, 0.0, kTwoPi);
    const double ci = f.value(r, t1, t2) + f.value(r, t1 + kPi, -t2);
    if (i == 0) c = ci;
    if (std::abs(ci - c) > tol::kAlgebraic) {
      std::ostringstream os;
      os << "gauge_normalize: f(r,t1,t2) + f(r,t1+pi,-t2) is not constant (" << c << " vs " << ci << " at r=" << r
         << ", t1=" << t1 << ", t2=" << t2 << ")";
      throw PreconditionError(os.str());
    }
  }
  GaugeNormalization g;
  g.c = c;
  g.q = q;
  g.map.from = ChartId::Cartesian4;
  g.map.to = ChartId::Cartesian4;
  g.map.map = [f, q, c](const ChartPoint& p) {
    const double r = std::hypot(p[0], p[1]);
    const double t1 = std::atan2(p[1], p[0]) - q;
    const double t3 = p[3] - q * p[2] + c / 2 - f.value(r, t1, p[2]);
    return make_point(ChartId::Cartesian4, {r * std::cos(t1), r * std::sin(t1), p[2], t3});
  };
  g.map.jacobian = [f, q](const ChartPoint& p) {
    const double x = p[0], y = p[1], r2 = x * x + y * y, r = std::sqrt(r2);
    const double t1 = std::atan2(y, x) - q;
    const Vec3 gr = f.grad(r, t1, p[2]);
    SmallMatrix J = identity4();
    J(0, 0) = std::cos(q);
    J(0, 1) = std::sin(q);
    J(1, 0) = -std::sin(q);
    J(1, 1) = std::cos(q);
    J(3, 0) = -(gr.x() * x / r - gr.y() * y / r2);
    J(3, 1) = -(gr.x() * y / r + gr.y() * x / r2);
    J(3, 2) = -q - gr.z();
    return J;
  };
  return g;
}

ModelConfig parse_model_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model config: line " + std::to_string(lineno) + " has no '='");
    const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (kv.count(k)) throw ConfigError("model config: duplicate key " + k);
    kv[k] = v;
  }
  auto take = [&kv](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto need = [&take](const std::string& k) {
    auto v = take(k);
    if (!v) throw ConfigError("model config: missing key " + k);
    return *v;
  };
  const std::string family = need("family");
  ModelConfig out;
  if (family == "ALG") {
    const auto beta = take("beta");
    const auto tag = take("tag");
    if (!beta && !tag) throw ConfigError("model config: ALG needs beta or tag");
    std::string t = tag ? *tag : alg_row_by_beta(parse_beta(*beta)).tag;
    if (beta && tag && std::abs(alg_row_by_tag(*tag).beta - parse_beta(*beta)) > 1e-12)
      throw ConfigError("model config: beta conflicts with tag " + *tag);
    std::optional<std::complex<double>> tau;
    if (auto v = take("tau")) tau = parse_tau(*v);
    const double L = parse_real("L", need("L"));
    const double R = parse_real("R", need("R"));
    out = make_alg_params(t, L, R, tau);
  } else if (family == "ALGstar") {
    ALGStarParams p;
    const double nu = parse_real("nu", need("nu"));
    if (nu != std::floor(nu)) throw ConfigError("model config: nu must be an integer");
    p.nu = static_cast<int>(nu);
    p.kappa0 = parse_real("kappa0", need("kappa0"));
    p.L = parse_real("L", need("L"));
    p.R = parse_real("R", need("R"));
    p.validate();
    out = p;
  } else {
    throw ConfigError("model config: family must be ALG or ALGstar, got '" + family + "'");
  }
  if (!kv.empty()) throw ConfigError("model config: unknown key " + kv.begin()->first);
  return out;
}

}  // namespace hkglue
