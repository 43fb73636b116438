#include "hkglue/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "hkglue/parallel.hpp"

namespace hkglue {

namespace {

__extension__ typedef __int128 i128;

struct DynkinData {
  const char* name;
  int n;
  std::vector<std::pair<int, int>> edges;
  IntVec marks;
  int affine;
};

// Simply laced diagrams; A~0 and A~1 are special-cased in dynkin_lattice.
DynkinData dynkin_data(FiberTag t) {
  switch (t) {
    case FiberTag::I0s:  // E1 central
      return {"D~4", 5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {2, 1, 1, 1, 1}, 4};
    case FiberTag::IV:  // E1 central, three arms of length 2
      return {"E~6", 7, {{0, 1}, {1, 2}, {0, 3}, {3, 4}, {0, 5}, {5, 6}}, {3, 2, 1, 2, 1, 2, 1}, 6};
    case FiberTag::III:  // chain E1..E7, E8 on E4
      return {"E~7", 8, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {3, 7}}, {1, 2, 3, 4, 3, 2, 1, 2}, 0};
    case FiberTag::II:  // chain E1..E8, E9 on E6
      return {"E~8", 9, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {5, 8}},
              {1, 2, 3, 4, 5, 6, 4, 2, 3}, 0};
    case FiberTag::IVs:
      return {"A~2", 3, {{0, 1}, {1, 2}, {0, 2}}, {1, 1, 1}, 0};
    default:
      throw StructuralError("dynkin_data: not a simply laced tag");
  }
}

// Fraction-free Gaussian elimination with row pivoting; returns the rank and
// the signed last pivot (the determinant when m is square and nonsingular).
std::pair<int, i128> bareiss(IntMat m) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::vector<std::vector<i128>> a(rows, std::vector<i128>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (m[i].size() != cols) throw StructuralError("bareiss: ragged matrix");
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m[i][j];
  }
  i128 prev = 1;
  int sign = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    if (p != r) {
      std::swap(a[p], a[r]);
      sign = -sign;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) a[i][j] = (a[i][j] * a[r][c] - a[i][c] * a[r][j]) / prev;
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return {static_cast<int>(r), sign * prev};
}

bool is_identity(const std::array<std::int64_t, 4>& m) { return m[0] == 1 && m[1] == 0 && m[2] == 0 && m[3] == 1; }

std::array<std::int64_t, 4> mul(const std::array<std::int64_t, 4>& x, const std::array<std::int64_t, 4>& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

std::string rel(int k) { return std::to_string(k); }

}  // namespace

std::string fiber_tag_name(FiberTag t) {
  switch (t) {
    case FiberTag::I0s: return "I0*";
    case FiberTag::II: return "II";
    case FiberTag::IIs: return "II*";
    case FiberTag::III: return "III";
    case FiberTag::IIIs: return "III*";
    case FiberTag::IV: return "IV";
    case FiberTag::IVs: return "IV*";
  }
  return "?";
}

const std::vector<FiberTag>& all_fiber_tags() {
  static const std::vector<FiberTag> tags{FiberTag::I0s, FiberTag::II,  FiberTag::IIs, FiberTag::III,
                                          FiberTag::IIIs, FiberTag::IV, FiberTag::IVs};
  return tags;
}

FiberTag parse_fiber_tag(const std::string& s) {
  for (FiberTag t : all_fiber_tags())
    if (fiber_tag_name(t) == s) return t;
  throw ConfigError("unknown fiber tag '" + s + "'; expected one of I0*, II, II*, III, III*, IV, IV*");
}

std::int64_t IntersectionLattice::pair(const IntVec& a, const IntVec& b) const {
  const std::size_t n = gram.size();
  if (a.size() != n || b.size() != n) throw StructuralError("IntersectionLattice::pair: dimension mismatch");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    std::int64_t row = 0;
    for (std::size_t j = 0; j < n; ++j) row += gram[i][j] * b[j];
    s += a[i] * row;
  }
  return s;
}

void IntersectionLattice::validate() const {
  const std::size_t n = gram.size();
  for (const auto& row : gram)
    if (row.size() != n) throw StructuralError(name + ": Gram matrix is not square");
  if (labels.size() != n || fiber.size() != n) throw StructuralError(name + ": labels or F have the wrong length");
  if (affine_node < 0 || static_cast<std::size_t>(affine_node) >= n) throw StructuralError(name + ": bad affine node");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (gram[i][j] != gram[j][i]) throw StructuralError(name + ": Gram matrix is not symmetric");
  for (std::size_t i = 0; i < n; ++i) {
    IntVec e(n, 0);
    e[i] = 1;
    if (pair(fiber, e) != 0) throw StructuralError(name + ": F." + labels[i] + " != 0");
  }
  if (square(fiber) != 0) throw StructuralError(name + ": F.F != 0");
}

IntMat IntersectionLattice::deleted_node_gram() const {
  IntMat out;
  for (int i = 0; i < rank(); ++i) {
    if (i == affine_node) continue;
    IntVec row;
    for (int j = 0; j < rank(); ++j)
      if (j != affine_node) row.push_back(gram[i][j]);
    out.push_back(std::move(row));
  }
  return out;
}

int alg_b2(FiberTag t) {
  switch (t) {
    case FiberTag::I0s: return 5;
    case FiberTag::II: return 9;
    case FiberTag::IIs: return 1;
    case FiberTag::III: return 8;
    case FiberTag::IIIs: return 2;
    case FiberTag::IV: return 7;
    case FiberTag::IVs: return 3;
  }
  throw ConfigError("alg_b2: unknown tag");
}

IntersectionLattice dynkin_lattice(FiberTag t) {
  IntersectionLattice L;
  if (t == FiberTag::IIs) {
    // Single nodal class of square zero.
    L.name = "A~0";
    L.gram = {{0}};
    L.fiber = {1};
  } else if (t == FiberTag::IIIs) {
    // Two classes meeting in two points.
    L.name = "A~1";
    L.gram = {{-2, 2}, {2, -2}};
    L.fiber = {1, 1};
  } else {
    const DynkinData d = dynkin_data(t);
    L.name = d.name;
    L.gram.assign(d.n, IntVec(d.n, 0));
    for (int i = 0; i < d.n; ++i) L.gram[i][i] = -2;
    for (auto [i, j] : d.edges) L.gram[i][j] = L.gram[j][i] = 1;
    L.fiber = d.marks;
    L.affine_node = d.affine;
  }
  for (int i = 0; i < L.rank(); ++i) L.labels.push_back("E" + std::to_string(i + 1));
  if (t == FiberTag::IIIs) L.affine_node = 1;
  L.validate();
  if (L.rank() != alg_b2(t)) throw StructuralError(L.name + ": rank disagrees with b2");
  return L;
}

int alg_star_b2(int nu) {
  if (nu < 1 || nu > 4) throw PreconditionError("alg_star_b2: nu must lie in 1..4");
  return 5 - nu;
}

int alg_star_moduli_dimension(int nu) { return 3 * (alg_star_b2(nu) - 1); }

std::int64_t exact_determinant(const IntMat& m) {
  for (const auto& row : m)
    if (row.size() != m.size()) throw StructuralError("exact_determinant: matrix is not square");
  if (m.empty()) return 1;
  const auto [r, piv] = bareiss(m);
  return r < static_cast<int>(m.size()) ? 0 : static_cast<std::int64_t>(piv);
}

int exact_rank(const IntMat& m) { return m.empty() ? 0 : bareiss(m).first; }

bool negative_definite(const IntMat& m) {
  for (std::size_t k = 1; k <= m.size(); ++k) {
    IntMat lead(k, IntVec(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) lead[i][j] = -m[i][j];
    if (exact_determinant(lead) <= 0) return false;
  }
  return true;
}

RootEnumeration enumerate_roots(const IntersectionLattice& L, int M) {
  if (M < 1) throw PreconditionError("enumerate_roots: coefficient bound must be at least 1");
  L.validate();
  const int n = L.rank();
  const std::size_t side = 2 * static_cast<std::size_t>(M) + 1;
  // One shard per value of the first coefficient; an odometer over the rest.
  const auto shards = parallel_map(side, [&](std::size_t s) {
    std::vector<IntVec> found;
    IntVec v(n, -M);
    v[0] = static_cast<std::int64_t>(s) - M;
    while (true) {
      if (L.square(v) == -2) found.push_back(v);
      int k = n - 1;
      while (k >= 1 && v[k] == M) v[k--] = -M;
      if (k < 1) break;
      ++v[k];
    }
    return found;
  });
  RootEnumeration out;
  out.bound = M;
  for (const auto& sh : shards) out.roots.insert(out.roots.end(), sh.begin(), sh.end());

  std::map<IntVec, std::vector<IntVec>> groups;
  const int a = L.affine_node;
  for (const auto& v : out.roots) {
    IntVec rep = v;
    for (int i = 0; i < n; ++i) rep[i] -= v[a] * L.fiber[i];
    groups[rep].push_back(v);
  }
  for (auto& [rep, members] : groups) out.cosets.push_back({rep, std::move(members)});
  return out;
}

std::array<double, 3> PeriodTriple::pair(const IntVec& c) const {
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    if (values[k].size() != c.size()) throw StructuralError("PeriodTriple::pair: dimension mismatch");
    for (std::size_t i = 0; i < c.size(); ++i) out[k] += static_cast<double>(c[i]) * values[k][i];
  }
  return out;
}

NondegeneracyResult nondegeneracy_check(const PeriodTriple& periods, const IntersectionLattice& L, int M, double tol) {
  for (const auto& v : periods.values)
    if (static_cast<int>(v.size()) != L.rank()) throw StructuralError("nondegeneracy_check: period arity mismatch");
  const RootEnumeration roots = enumerate_roots(L, M);
  NondegeneracyResult res;
  for (const auto& c : roots.roots) {
    ++res.roots_checked;
    const auto w = periods.pair(c);
    if (std::abs(w[0]) <= tol && std::abs(w[1]) <= tol && std::abs(w[2]) <= tol) {
      res.pass = false;
      res.witness = c;
      break;
    }
  }
  return res;
}

int MonodromyMatrix::order() const {
  std::array<std::int64_t, 4> p = m;
  for (int k = 1; k <= 12; ++k) {
    if (is_identity(p)) return k;
    p = mul(p, m);
  }
  return 0;
}

void MonodromyMatrix::validate() const {
  if (det() != 1) throw PreconditionError("monodromy " + tag + ": det = " + std::to_string(det()) + ", expected 1");
  bool finite = tag == "I0";
  for (FiberTag t : all_fiber_tags()) finite = finite || tag == fiber_tag_name(t);
  if (finite) {
    const int k = order();
    if (k == 0 || k > 6) throw PreconditionError("monodromy " + tag + ": no A^k = Id with k <= 6");
  }
}

MonodromyMatrix standard_monodromy(FiberTag t) {
  MonodromyMatrix A;
  A.tag = fiber_tag_name(t);
  switch (t) {
    case FiberTag::I0s: A.m = {-1, 0, 0, -1}; break;
    case FiberTag::II: A.m = {1, 1, -1, 0}; break;
    case FiberTag::IIs: A.m = {0, -1, 1, 1}; break;
    case FiberTag::III: A.m = {0, 1, -1, 0}; break;
    case FiberTag::IIIs: A.m = {0, -1, 1, 0}; break;
    case FiberTag::IV: A.m = {0, 1, -1, -1}; break;
    case FiberTag::IVs: A.m = {-1, -1, 1, 0}; break;
  }
  return A;
}

MonodromyMatrix identity_monodromy() { return {}; }

MvRanks mv_ranks(const MonodromyMatrix& A) {
  if (A.det() != 1) throw PreconditionError("mv_ranks: det A must be 1");
  const auto& a = A.m;
  MvRanks r;
  r.h0_rank = exact_rank({{1, -1}, {1, -1}});
  r.h1_rank = exact_rank({{1, 0, -1, 0}, {0, 1, 0, -1}, {1, 0, -a[0], -a[1]}, {0, 1, -a[2], -a[3]}});
  r.kernel_dim = 2 - exact_rank({{a[0] - 1, a[1]}, {a[2], a[3] - 1}});
  r.b1 = (2 - r.h0_rank) + (4 - r.h1_rank);
  return r;
}

int mv_b1(const MonodromyMatrix& A) { return mv_ranks(A).b1; }

int mv_b2(const MonodromyMatrix& A) { return mv_b1(A); }

GluedBetti glued_betti(const GluingPieces& p) {
  auto fail = [](const std::string& what) { throw InconsistentPiecesError("glued_betti: " + what); };
  for (int k = 0; k < 5; ++k)
    if (p.U.b[k] < 0 || p.V.b[k] < 0) fail("negative Betti number in degree " + rel(k));
  for (int k = 0; k < 4; ++k)
    if (p.W[k] < 0) fail("negative seam Betti number in degree " + rel(k));
  if (p.W[0] != p.W[3] || p.W[1] != p.W[2]) fail("seam violates Poincare duality b^k(W) = b^{3-k}(W)");
  for (int k = 0; k < 4; ++k) {
    const int r = p.restriction_rank[k];
    if (r < 0) fail("r_" + rel(k) + " < 0");
    if (r > p.U.b[k] + p.V.b[k]) fail("r_" + rel(k) + " > b^" + rel(k) + "(U) + b^" + rel(k) + "(V)");
    if (r > p.W[k]) fail("r_" + rel(k) + " > b^" + rel(k) + "(W)");
  }
  GluedBetti g;
  for (int k = 0; k < 5; ++k) {
    const int kernel = p.U.b[k] + p.V.b[k] - (k < 4 ? p.restriction_rank[k] : 0);
    const int coker = k > 0 ? p.W[k - 1] - p.restriction_rank[k - 1] : 0;
    g.b[k] = kernel + coker;
  }
  if (g.b[0] != 1) fail("b^0(M) = " + rel(g.b[0]) + ", expected a connected result");
  if (g.b[4] != g.b[0]) fail("b^4(M) != b^0(M)");
  if (g.b[1] != g.b[3]) fail("b^1(M) != b^3(M)");
  const int sigma = p.U.signature + p.V.signature;
  if (std::abs(sigma) > g.b[2] || (g.b[2] + sigma) % 2 != 0)
    fail("signature " + rel(sigma) + " incompatible with b^2 = " + rel(g.b[2]));
  g.b1 = g.b[1];
  g.b2_plus = (g.b[2] + sigma) / 2;
  g.b2_minus = (g.b[2] - sigma) / 2;
  g.chi = g.b[0] - g.b[1] + g.b[2] - g.b[3] + g.b[4];
  return g;
}

GluingPieces k3_pieces(int nu) {
  const int bx = alg_star_b2(nu);
  GluingPieces p;
  // X_nu: negative semidefinite form with the fiber as its radical.
  p.V.b = {1, 0, bx, 0, 0};
  p.V.signature = -(bx - 1);
  // The rest of the fibration carries Euler number 24 - chi(X_nu).
  p.U.b = {1, 0, 17 + nu, 0, 0};
  p.U.signature = -16 - p.V.signature;
  p.W = {1, 1, 1, 1};
  p.restriction_rank = {1, 0, 1, 0};
  return p;
}

}  // namespace hkglue
