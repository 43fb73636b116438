#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "hkglue/topology.hpp"

using namespace hkglue;

namespace {

Eigen::MatrixXd to_eigen(const IntMat& m) {
  Eigen::MatrixXd e(m.size(), m.empty() ? 0 : m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) e(i, j) = static_cast<double>(m[i][j]);
  return e;
}

// Descending recursive traversal; shares nothing with the library odometer.
std::set<IntVec> brute_roots(const IntersectionLattice& L, int M) {
  std::set<IntVec> out;
  IntVec v(L.rank());
  std::function<void(int)> rec = [&](int k) {
    if (k == L.rank()) {
      std::int64_t s = 0;
      for (int i = 0; i < L.rank(); ++i)
        for (int j = 0; j < L.rank(); ++j) s += v[i] * L.gram[i][j] * v[j];
      if (s == -2) out.insert(v);
      return;
    }
    for (int c = M; c >= -M; --c) {
      v[k] = c;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

std::set<IntVec> reps(const RootEnumeration& r) {
  std::set<IntVec> s;
  for (const auto& c : r.cosets) s.insert(c.representative);
  return s;
}

PeriodTriple random_periods(int n, std::mt19937_64& g) {
  std::normal_distribution<double> N;
  PeriodTriple p;
  for (auto& v : p.values) {
    v.resize(n);
    for (auto& x : v) x = N(g);
  }
  return p;
}

}  // namespace

TEST(Lattice, TableB2Values) {
  const std::map<std::string, int> table{{"I0*", 5}, {"II", 9}, {"II*", 1}, {"III", 8},
                                         {"III*", 2}, {"IV", 7}, {"IV*", 3}};
  ASSERT_EQ(all_fiber_tags().size(), table.size());
  for (FiberTag t : all_fiber_tags()) {
    EXPECT_EQ(alg_b2(t), table.at(fiber_tag_name(t))) << fiber_tag_name(t);
    EXPECT_EQ(dynkin_lattice(t).rank(), table.at(fiber_tag_name(t))) << fiber_tag_name(t);
    EXPECT_EQ(parse_fiber_tag(fiber_tag_name(t)), t);
  }
}

TEST(Lattice, UnknownTagsRejected) {
  EXPECT_THROW(parse_fiber_tag("I1"), ConfigError);
  EXPECT_THROW(parse_fiber_tag("I0"), ConfigError);
  EXPECT_THROW(parse_fiber_tag("V"), ConfigError);
}

TEST(Lattice, D4TildeGramAndFiber) {
  const auto L = dynkin_lattice(FiberTag::I0s);
  EXPECT_EQ(L.name, "D~4");
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const std::int64_t want = i == j ? -2 : ((i == 0) != (j == 0) ? 1 : 0);
      EXPECT_EQ(L.gram[i][j], want) << i << "," << j;
    }
  EXPECT_EQ(L.fiber, (IntVec{2, 1, 1, 1, 1}));
  EXPECT_EQ(L.square(L.fiber), 0);
  EXPECT_EQ(L.affine_node, 4);
}

TEST(Lattice, FiberIsNullAndOrthogonalEverywhere) {
  for (FiberTag t : all_fiber_tags()) {
    const auto L = dynkin_lattice(t);
    EXPECT_NO_THROW(L.validate());
    EXPECT_EQ(L.fiber[L.affine_node], 1) << L.name;
    for (int i = 0; i < L.rank(); ++i) {
      IntVec e(L.rank(), 0);
      e[i] = 1;
      EXPECT_EQ(L.pair(L.fiber, e), 0) << L.name << " " << L.labels[i];
    }
  }
}

TEST(Lattice, DeletedNodeNegativeDefinite) {
  // det of the finite Cartan matrix: D4 4, E8 1, E7 2, E6 3, A1 2, A2 3.
  const std::map<std::string, std::int64_t> cartan_det{{"D~4", 4}, {"E~8", 1}, {"E~7", 2}, {"E~6", 3},
                                                       {"A~0", 1}, {"A~1", 2}, {"A~2", 3}};
  for (FiberTag t : all_fiber_tags()) {
    const auto L = dynkin_lattice(t);
    const IntMat D = L.deleted_node_gram();
    EXPECT_TRUE(negative_definite(D)) << L.name;
    IntMat negD = D;
    for (auto& row : negD)
      for (auto& x : row) x = -x;
    EXPECT_EQ(exact_determinant(negD), cartan_det.at(L.name)) << L.name;
    if (!D.empty()) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(D));
      EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0) << L.name;
    }
    // The full form is only semidefinite: F spans the radical.
    EXPECT_FALSE(negative_definite(L.gram)) << L.name;
    EXPECT_EQ(exact_determinant(L.gram), 0) << L.name;
  }
}

TEST(Lattice, ValidateRejectsBrokenData) {
  auto L = dynkin_lattice(FiberTag::I0s);
  L.gram[0][1] = 2;
  EXPECT_THROW(L.validate(), StructuralError);
  L = dynkin_lattice(FiberTag::I0s);
  L.fiber = {1, 1, 1, 1, 1};
  EXPECT_THROW(L.validate(), StructuralError);
}

TEST(ExactArithmetic, MatchesFloatingPointOnSmallMatrices) {
  std::mt19937_64 g(3);
  std::uniform_int_distribution<int> U(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    IntMat m(n, IntVec(n));
    for (auto& row : m)
      for (auto& x : row) x = U(g);
    if (trial % 7 == 0) m[n - 1] = m[0];  // force some singular cases
    const Eigen::MatrixXd e = to_eigen(m);
    EXPECT_NEAR(static_cast<double>(exact_determinant(m)), e.determinant(), 1e-6);
    EXPECT_EQ(exact_rank(m), Eigen::FullPivLU<Eigen::MatrixXd>(e).rank());
  }
  EXPECT_EQ(exact_rank({{1, 2, 3}, {2, 4, 6}}), 1);
  EXPECT_EQ(exact_rank({{0, 0, 1}, {0, 0, 2}, {1, 0, 0}}), 2);
}

TEST(Roots, D4TildeHas24CosetsStableInM) {
  const auto L = dynkin_lattice(FiberTag::I0s);
  const auto r3 = enumerate_roots(L, 3);
  const auto r4 = enumerate_roots(L, 4);
  EXPECT_EQ(r3.cosets.size(), 24u);
  EXPECT_EQ(r4.cosets.size(), 24u);
  EXPECT_EQ(reps(r3), reps(r4));
  for (const auto& c : r3.cosets) {
    EXPECT_EQ(c.representative[L.affine_node], 0);
    EXPECT_EQ(L.square(c.representative), -2);
    for (const auto& v : c.members) {
      IntVec d(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i] - c.representative[i];
      const std::int64_t a = v[L.affine_node];
      for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(d[i], a * L.fiber[i]);
    }
  }
}

TEST(Roots, IndependentReenumerationAgrees) {
  for (auto [t, M] : {std::pair{FiberTag::I0s, 3}, std::pair{FiberTag::IVs, 3}, std::pair{FiberTag::IIIs, 4},
                      std::pair{FiberTag::IV, 2}}) {
    const auto L = dynkin_lattice(t);
    const auto r = enumerate_roots(L, M);
    const std::set<IntVec> lib(r.roots.begin(), r.roots.end());
    EXPECT_EQ(lib.size(), r.roots.size()) << L.name;
    EXPECT_TRUE(std::is_sorted(r.roots.begin(), r.roots.end())) << L.name;
    EXPECT_EQ(lib, brute_roots(L, M)) << L.name;
    std::size_t members = 0;
    for (const auto& c : r.cosets) members += c.members.size();
    EXPECT_EQ(members, r.roots.size());
  }
}

TEST(Roots, CosetCountsMatchFiniteRootSystems) {
  // |roots| of A2 and E6; the box holds the highest root once M >= 1 and 3.
  EXPECT_EQ(enumerate_roots(dynkin_lattice(FiberTag::IVs), 2).cosets.size(), 6u);
  EXPECT_EQ(enumerate_roots(dynkin_lattice(FiberTag::IIIs), 2).cosets.size(), 2u);
  EXPECT_EQ(enumerate_roots(dynkin_lattice(FiberTag::IV), 3).cosets.size(), 72u);
}

TEST(Roots, A0TildeHasNone) {
  const auto r = enumerate_roots(dynkin_lattice(FiberTag::IIs), 5);
  EXPECT_TRUE(r.roots.empty());
  EXPECT_TRUE(r.cosets.empty());
}

TEST(Roots, RejectsBadBound) {
  EXPECT_THROW(enumerate_roots(dynkin_lattice(FiberTag::I0s), 0), PreconditionError);
}

TEST(Nondegeneracy, RandomPeriodsPass) {
  const auto L = dynkin_lattice(FiberTag::I0s);
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto res = nondegeneracy_check(random_periods(L.rank(), g), L, 3);
    EXPECT_TRUE(res.pass);
    EXPECT_FALSE(res.witness.has_value());
    EXPECT_EQ(res.roots_checked, enumerate_roots(L, 3).roots.size());
  }
}

TEST(Nondegeneracy, DegenerateTripleReturnsWitness) {
  const auto L = dynkin_lattice(FiberTag::I0s);
  const IntVec root{1, 1, 0, 0, 0};
  ASSERT_EQ(L.square(root), -2);
  std::mt19937_64 g(5);
  PeriodTriple p = random_periods(L.rank(), g);
  for (auto& v : p.values) {
    double dot = 0.0, nn = 0.0;
    for (int i = 0; i < L.rank(); ++i) dot += v[i] * root[i], nn += double(root[i] * root[i]);
    for (int i = 0; i < L.rank(); ++i) v[i] -= dot / nn * root[i];
  }
  const auto res = nondegeneracy_check(p, L, 3);
  ASSERT_FALSE(res.pass);
  ASSERT_TRUE(res.witness.has_value());
  IntVec neg = root;
  for (auto& x : neg) x = -x;
  EXPECT_TRUE(*res.witness == root || *res.witness == neg);
  for (double w : p.pair(*res.witness)) EXPECT_LE(std::abs(w), 1e-12);
}

TEST(Nondegeneracy, IntegerPeriodsAreExact) {
  const auto L = dynkin_lattice(FiberTag::IVs);
  // The root E1 + E2 pairs to zero with all three functionals.
  PeriodTriple p;
  p.values = {std::vector<double>{1, -1, 3}, std::vector<double>{2, -2, -1}, std::vector<double>{0, 0, 5}};
  const auto res = nondegeneracy_check(p, L, 2, 0.0);
  ASSERT_FALSE(res.pass);
  EXPECT_EQ(L.square(*res.witness), -2);
  EXPECT_EQ(p.pair(*res.witness), (std::array<double, 3>{0, 0, 0}));
}

TEST(Nondegeneracy, PassIsOpenUnderSmallPerturbation) {
  const auto L = dynkin_lattice(FiberTag::I0s);
  std::mt19937_64 g(21);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 20; ++trial) {
    const PeriodTriple p = random_periods(L.rank(), g);
    ASSERT_TRUE(nondegeneracy_check(p, L, 3).pass);
    for (double eps : {1e-3, 1e-6, 1e-9}) {
      PeriodTriple q = p;
      for (auto& v : q.values)
        for (auto& x : v) x += eps * N(g);
      EXPECT_TRUE(nondegeneracy_check(q, L, 3).pass) << eps;
    }
  }
}

TEST(Nondegeneracy, ArityMismatchThrows) {
  PeriodTriple p;
  p.values = {std::vector<double>{1}, std::vector<double>{1}, std::vector<double>{1}};
  EXPECT_THROW(nondegeneracy_check(p, dynkin_lattice(FiberTag::I0s), 2), StructuralError);
}

TEST(Monodromy, IdentityGivesThree) {
  const auto r = mv_ranks(identity_monodromy());
  EXPECT_EQ(r.h0_rank, 1);
  EXPECT_EQ(r.kernel_dim, 2);
  EXPECT_EQ(r.b1, 3);
  EXPECT_EQ(mv_b2(identity_monodromy()), 3);
}

TEST(Monodromy, FiniteRepresentativesGiveOne) {
  const std::map<std::string, int> order{{"I0*", 2}, {"II", 6}, {"II*", 6}, {"III", 4},
                                         {"III*", 4}, {"IV", 3}, {"IV*", 3}};
  for (FiberTag t : all_fiber_tags()) {
    const auto A = standard_monodromy(t);
    EXPECT_NO_THROW(A.validate());
    EXPECT_EQ(A.order(), order.at(A.tag)) << A.tag;
    // Brute-force kernel of A - Id on a box.
    int nonzero = 0;
    for (int x = -5; x <= 5; ++x)
      for (int y = -5; y <= 5; ++y)
        if ((x || y) && (A.m[0] - 1) * x + A.m[1] * y == 0 && A.m[2] * x + (A.m[3] - 1) * y == 0) ++nonzero;
    EXPECT_EQ(nonzero, 0) << A.tag;
    EXPECT_EQ(mv_b1(A), 1) << A.tag;
    EXPECT_EQ(mv_b2(A), mv_b1(A)) << A.tag;
  }
}

TEST(Monodromy, B1IsOnePlusKernelForRandomSL2) {
  const std::array<std::int64_t, 4> S{0, -1, 1, 0}, T{1, 1, 0, 1}, Ti{1, -1, 0, 1};
  auto mul = [](auto x, auto y) {
    return std::array<std::int64_t, 4>{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                                       x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
  };
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 200; ++trial) {
    MonodromyMatrix A;
    A.tag = "random";
    for (int k = 0; k < 1 + trial % 6; ++k) {
      const auto pick = g() % 3;
      A.m = mul(A.m, pick == 0 ? S : (pick == 1 ? T : Ti));
    }
    const auto r = mv_ranks(A);
    const int ker = 2 - exact_rank({{A.m[0] - 1, A.m[1]}, {A.m[2], A.m[3] - 1}});
    EXPECT_EQ(r.b1, 1 + ker);
  }
  MonodromyMatrix parabolic;
  parabolic.m = T;
  parabolic.tag = "I1";
  EXPECT_EQ(mv_b1(parabolic), 2);
  EXPECT_EQ(parabolic.order(), 0);
}

TEST(Monodromy, RejectsBadDeterminantAndInfiniteFiniteTag) {
  MonodromyMatrix A;
  A.m = {2, 0, 0, 1};
  EXPECT_THROW(mv_b1(A), PreconditionError);
  EXPECT_THROW(A.validate(), PreconditionError);
  MonodromyMatrix B;
  B.m = {1, 1, 0, 1};
  B.tag = "IV";
  EXPECT_THROW(B.validate(), PreconditionError);
}

TEST(Glued, K3BettiNumbers) {
  for (int nu = 1; nu <= 4; ++nu) {
    const GluedBetti g = glued_betti(k3_pieces(nu));
    EXPECT_EQ(g.b1, 0) << nu;
    EXPECT_EQ(g.b2_plus, 3) << nu;
    EXPECT_EQ(g.b2_minus, 19) << nu;
    EXPECT_EQ(g.chi, 24) << nu;
    EXPECT_EQ(g.b, (std::array<int, 5>{1, 0, 22, 0, 1})) << nu;
  }
}

TEST(Glued, EulerCharacteristicIsAdditive) {
  for (int nu = 1; nu <= 4; ++nu) {
    const GluingPieces p = k3_pieces(nu);
    const int chiW = p.W[0] - p.W[1] + p.W[2] - p.W[3];
    const GluedBetti g = glued_betti(p);
    EXPECT_EQ(g.chi, p.U.euler() + p.V.euler() - chiW);
    EXPECT_EQ(g.chi, 2 - 2 * g.b1 + g.b[2]);
  }
}

TEST(Glued, ModuliDimensions) {
  const int want[] = {9, 6, 3, 0};
  for (int nu = 1; nu <= 4; ++nu) EXPECT_EQ(alg_star_moduli_dimension(nu), want[nu - 1]);
  EXPECT_THROW(alg_star_b2(0), PreconditionError);
  EXPECT_THROW(alg_star_b2(5), PreconditionError);
}

TEST(Glued, InconsistentDataNamesTheRelation) {
  auto expect_msg = [](const GluingPieces& p, const std::string& part) {
    try {
      glued_betti(p);
      ADD_FAILURE() << "no error for " << part;
    } catch (const InconsistentPiecesError& e) {
      EXPECT_NE(std::string(e.what()).find(part), std::string::npos) << e.what();
    }
  };
  GluingPieces p = k3_pieces(2);
  p.restriction_rank[2] = 2;
  expect_msg(p, "r_2 > b^2(W)");
  p = k3_pieces(2);
  p.restriction_rank[0] = 0;
  expect_msg(p, "b^0(M)");
  p = k3_pieces(2);
  p.W = {1, 2, 1, 1};
  expect_msg(p, "Poincare");
  p = k3_pieces(2);
  p.restriction_rank[1] = 1;
  expect_msg(p, "r_1 > b^1(U) + b^1(V)");
  p = k3_pieces(2);
  p.U.signature += 1;
  expect_msg(p, "signature");
}

TEST(Glued, SphereBundleSeamExample) {
  // Two copies of S^2 x D^2 glued along S^2 x S^1 give S^2 x S^2.
  GluingPieces p;
  p.U.b = {1, 0, 1, 0, 0};
  p.V.b = {1, 0, 1, 0, 0};
  p.W = {1, 1, 1, 1};
  p.restriction_rank = {1, 0, 1, 0};
  const GluedBetti g = glued_betti(p);
  EXPECT_EQ(g.b, (std::array<int, 5>{1, 0, 2, 0, 1}));
  EXPECT_EQ(g.chi, 4);
}
