#pragma once

// Integral lattices and Betti bookkeeping. Everything here is exact integer
// arithmetic except the pairing of real-valued periods with lattice classes.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hkglue/constants.hpp"
#include "hkglue/errors.hpp"

namespace hkglue {

using IntVec = std::vector<std::int64_t>;
using IntMat = std::vector<IntVec>;

// Finite-monodromy fiber tags that close an ALG end.
enum class FiberTag { I0s, II, IIs, III, IIIs, IV, IVs };

std::string fiber_tag_name(FiberTag t);
// Accepts "I0*", "II", "II*", "III", "III*", "IV", "IV*". ConfigError on any
// other string, including "I1" and "I0".
FiberTag parse_fiber_tag(const std::string& s);
const std::vector<FiberTag>& all_fiber_tags();

struct IntersectionLattice {
  std::string name;
  IntMat gram;
  std::vector<std::string> labels;
  // Null class orthogonal to every basis vector.
  IntVec fiber;
  // Index of the affine node; deleting it leaves a negative definite lattice.
  int affine_node = 0;

  int rank() const { return static_cast<int>(gram.size()); }
  std::int64_t pair(const IntVec& a, const IntVec& b) const;
  std::int64_t square(const IntVec& a) const { return pair(a, a); }
  // StructuralError on shape mismatch, asymmetry, F.F != 0 or F.E_i != 0.
  void validate() const;
  // Gram matrix with the affine node row and column removed.
  IntMat deleted_node_gram() const;
};

// Rank of H^2 of the ALG space with the given fiber at infinity.
int alg_b2(FiberTag t);
// Extended Dynkin presentation with E_i^2 = -2 and adjacent nodes pairing to
// +1; F carries the affine marks.
//   I0* D~4, II E~8, III E~7, IV E~6, II* A~0, III* A~1, IV* A~2
// A~0 is the single class F with F^2 = 0; the two A~1 nodes pair to 2.
IntersectionLattice dynkin_lattice(FiberTag t);

// b2 of the ALG* space X_nu, 5 - nu for nu in 1..4. Only the rank is exposed.
int alg_star_b2(int nu);
// Dimension 3 (b2(X_nu) - 1) of the ALG* period domain.
int alg_star_moduli_dimension(int nu);

// Exact determinant and rank over Q (fraction-free elimination).
std::int64_t exact_determinant(const IntMat& m);
int exact_rank(const IntMat& m);
// Every leading principal minor of -m is positive. The empty matrix counts.
bool negative_definite(const IntMat& m);

struct RootCoset {
  // Representative with zero coefficient on the affine node, so it lies in
  // the deleted-node sublattice.
  IntVec representative;
  // Members inside the box, lexicographic order.
  std::vector<IntVec> members;
};

struct RootEnumeration {
  int bound = 0;
  // Every v in [-M, M]^n with v.v = -2, lexicographic order.
  std::vector<IntVec> roots;
  // Grouped by v - v_a F with a the affine node (F_a = 1), ordered by
  // representative.
  std::vector<RootCoset> cosets;
};

// Exhaustive over the coefficient box; sharded over the first coordinate and
// merged in order. PreconditionError when M < 1.
RootEnumeration enumerate_roots(const IntersectionLattice& L, int M);

// Values of [omega_1], [omega_2], [omega_3] on the basis classes.
struct PeriodTriple {
  std::array<std::vector<double>, 3> values;
  std::array<double, 3> pair(const IntVec& c) const;
};

struct NondegeneracyResult {
  bool pass = true;
  // First root, in enumeration order, with all three pairings within tol.
  std::optional<IntVec> witness;
  std::size_t roots_checked = 0;
};

// omega[C] != 0 for every root C in the box. Integer-valued periods pair
// exactly in double, so tol only matters for genuinely real inputs.
NondegeneracyResult nondegeneracy_check(const PeriodTriple& periods, const IntersectionLattice& L, int M,
                                        double tol = tol::kPeriodZero);

struct MonodromyMatrix {
  std::array<std::int64_t, 4> m{1, 0, 0, 1};  // row-major a b / c d
  std::string tag = "I0";

  std::int64_t det() const { return m[0] * m[3] - m[1] * m[2]; }
  // Smallest k in 1..12 with A^k = Id, or 0.
  int order() const;
  // PreconditionError unless det = 1; for a finite-monodromy tag also needs
  // A^k = Id for some k <= 6.
  void validate() const;
};

// Kodaira representative of the local monodromy around the given fiber.
MonodromyMatrix standard_monodromy(FiberTag t);
MonodromyMatrix identity_monodromy();

struct MvRanks {
  // Rank of (a, b) -> (a - b, a - b) on H^0 of the two charts.
  int h0_rank = 0;
  // Rank of (C1, C2) -> (C1 - C2, C1 - A C2) on H^1.
  int h1_rank = 0;
  int kernel_dim = 0;  // dim ker(A - Id)
  int b1 = 0;
};

// Torus bundle over a circle with monodromy A, covered by two interval
// charts. b1 = (2 - h0_rank) + (4 - h1_rank). PreconditionError unless det = 1.
MvRanks mv_ranks(const MonodromyMatrix& A);
int mv_b1(const MonodromyMatrix& A);
// Poincare duality on the closed orientable 3-manifold.
int mv_b2(const MonodromyMatrix& A);

// Betti data of one piece of a decomposition M = U u V.
struct PieceBetti {
  std::array<int, 5> b{};
  // Signature of the intersection form on H^2 of the piece rel boundary.
  int signature = 0;
  int euler() const { return b[0] - b[1] + b[2] - b[3] + b[4]; }
};

struct GluingPieces {
  PieceBetti U, V;
  // Seam 3-manifold U n V.
  std::array<int, 4> W{};
  // rank of H^k(U) + H^k(V) -> H^k(U n V), k = 0..3.
  std::array<int, 4> restriction_rank{};
};

class InconsistentPiecesError : public StructuralError {
 public:
  using StructuralError::StructuralError;
};

struct GluedBetti {
  std::array<int, 5> b{};
  int b1 = 0, b2_plus = 0, b2_minus = 0, chi = 0;
  int signature() const { return b2_plus - b2_minus; }
};

// Mayer-Vietoris rank count
//   b^k(M) = (b^k U + b^k V - r_k) + (b^{k-1} W - r_{k-1})
// with the signature additive over the seam. InconsistentPiecesError names
// the first violated relation.
GluedBetti glued_betti(const GluingPieces& pieces);

// Decomposition of the glued K3 around an X_nu bubble: V = X_nu, seam the
// infranil I_nu^3 with b = (1, 1, 1, 1), H^1 of both pieces zero and the
// restriction onto H^2 of the seam surjective.
GluingPieces k3_pieces(int nu);

}  // namespace hkglue
