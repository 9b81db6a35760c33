#pragma once

#include <optional>
#include <string>

#include "gkp/common.hpp"

namespace gkp {

inline constexpr double kGramTol = 1e-8;

struct GkpLattice {
  std::string name;
  int n_modes = 0;
  Mat M;  // columns are basis vectors, units of ell
  MatI A;  // symplectic Gram matrix M^T Omega M
  int d = 1;
  // Explicit logical X/Z representatives (units of ell) for named qubit codes.
  std::optional<Vec> x_hint, z_hint;
};

GkpLattice from_generator(const Mat& m, double tol = kGramTol, std::string name = "custom");

enum class LatticeKind {
  SquareQubit,
  CanonicalSquare,
  Rectangular,
  HexQubit,
  CanonicalHex,
  Tesseract,
  D4Qubit,
  CanonicalD4,
  E8,
  GkpBell,
};

// param: eta for Rectangular, mode count for CanonicalSquare (default 1).
GkpLattice standard_lattice(LatticeKind kind, double param = 0.0);
GkpLattice lattice_by_name(const std::string& name, double param = 0.0);

Mat dual(const GkpLattice& l);

struct PauliData {
  Vec x_vec, y_vec, z_vec;  // units of ell
  double dx = 0.0, dy = 0.0, dz = 0.0;
};

PauliData pauli_data(const GkpLattice& l, int coeff_bound = 2);

Vec syndrome(const GkpLattice& l, const Vec& e);

enum class Pauli { I, X, Y, Z };
const char* pauli_name(Pauli p);

// Coset classifier with cached representatives; r is in physical units.
class CosetClassifier {
 public:
  explicit CosetClassifier(const GkpLattice& l, int coeff_bound = 2);
  Pauli operator()(const Vec& r, double tol = 1e-6) const;
  const PauliData& paulis() const { return pd_; }

 private:
  Mat minv_;
  Vec reps_[3];  // primal coordinates M^{-1} j for X, Y, Z
  PauliData pd_;
};

Pauli classify_residual(const GkpLattice& l, const Vec& r, double tol = 1e-6);

// Outer stabilizers: (n-k) x 2n binary matrix, each row a stabilizer in
// interleaved (x1,z1,x2,z2,...) convention.
GkpLattice concatenate(const Mat& inner, const MatI& outer_stabilizers, bool reduce = false);

Mat lll_reduce(const Mat& m, double delta = 0.75);

// True iff every column of b is an integer combination of columns of a.
bool contains_lattice(const Mat& a, const Mat& b, double tol = 1e-8);
bool same_lattice(const Mat& a, const Mat& b, double tol = 1e-8);

}  // namespace gkp
