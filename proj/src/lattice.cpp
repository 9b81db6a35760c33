#include "gkp/lattice.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "gkp/symplectic.hpp"

namespace gkp {

namespace {

bool near_integer(const Mat& x, double tol) {
  return (x - x.array().round().matrix()).cwiseAbs().maxCoeff() <= tol;
}

// Bits of 2*c mod 2 for primal coordinates c of a dual vector (d = 2 cosets).
unsigned coset_key(const Vec& c) {
  unsigned key = 0;
  for (int i = 0; i < c.size(); ++i) {
    long v = std::lround(2.0 * c(i));
    if (((v % 2) + 2) % 2) key |= 1u << i;
  }
  return key;
}

// Calls fn(b) for every integer vector with entries in [-bound, bound],
// lexicographic order with the first coordinate varying slowest.
template <class Fn>
void for_each_box(int dim, int bound, Fn&& fn) {
  Eigen::VectorXi b = Eigen::VectorXi::Constant(dim, -bound);
  while (true) {
    fn(b);
    int i = dim - 1;
    while (i >= 0 && b(i) == bound) b(i--) = -bound;
    if (i < 0) return;
    ++b(i);
  }
}

struct CosetMinima {
  std::map<unsigned, Vec> best;
};

CosetMinima coset_minima(const GkpLattice& l, const Mat& dual_basis, int bound) {
  const int dim = static_cast<int>(l.M.rows());
  Mat minv = l.M.inverse();
  CosetMinima out;
  std::map<unsigned, double> len;
  for_each_box(dim, bound, [&](const Eigen::VectorXi& b) {
    Vec v = dual_basis * b.cast<double>();
    unsigned key = coset_key(minv * v);
    if (key == 0) return;
    double n2 = v.squaredNorm();
    auto it = len.find(key);
    if (it == len.end() || n2 < it->second - 1e-12) {
      len[key] = n2;
      out.best[key] = v;
    }
  });
  return out;
}

Mat hex_canonical() {
  double s = std::sqrt(2.0) / std::pow(3.0, 0.25);
  Mat m(2, 2);
  m << 1.0, -0.5, 0.0, std::sqrt(3.0) / 2.0;
  return s * m;
}

Mat tesseract_generator() {
  double s = 1.0 / std::sqrt(2.0);
  Mat o(4, 4);
  o << 1, 0, 0, 0,
       0, s, 0, s,
       0, 0, 1, 0,
       0, s, 0, -s;
  return std::pow(2.0, 0.25) * o;
}

Mat d4_checkerboard() {
  Mat m(4, 4);
  m << -1, 1, 0, 0,
       -1, -1, 1, 0,
       0, 0, -1, 1,
       0, 0, 0, -1;
  return m;
}

Mat canonical_d4() {
  double s = 1.0 / std::sqrt(2.0);
  Mat m(4, 4);
  m << 0.5, 0, 0, -0.5,
       -s, s, s, 0,
       0.5, 0, 0, 0.5,
       0, s, -s, s;
  return std::pow(2.0, 0.25) * m;
}

Mat e8_generator() {
  Mat m = Mat::Zero(8, 8);
  m(0, 0) = 2.0;
  for (int i = 1; i < 7; ++i) {
    m(i - 1, i) = -1.0;
    m(i, i) = 1.0;
  }
  for (int i = 0; i < 8; ++i) m(i, 7) = 0.5;
  return m;
}

}  // namespace

GkpLattice from_generator(const Mat& m, double tol, std::string name) {
  require_phase_space_square(m, "generator");
  GkpLattice l;
  l.name = std::move(name);
  l.n_modes = static_cast<int>(m.rows() / 2);
  l.M = m;
  Mat a = m.transpose() * omega(l.n_modes) * m;
  if (!near_integer(a, tol))
    throw Error(ErrorCode::NotIntegral, "symplectic Gram matrix is not integral");
  l.A = a.array().round().cast<int>().matrix();
  double det = l.A.cast<double>().determinant();
  long det_i = std::lround(det);
  if (std::abs(det - static_cast<double>(det_i)) > 1e-6 || det_i <= 0)
    throw Error(ErrorCode::InvalidCodeDimension, "det A is not a positive integer");
  long d = std::lround(std::sqrt(static_cast<double>(det_i)));
  if (d * d != det_i)
    throw Error(ErrorCode::InvalidCodeDimension, "det A is not a perfect square");
  l.d = static_cast<int>(d);
  return l;
}

GkpLattice standard_lattice(LatticeKind kind, double param) {
  const double r2 = std::sqrt(2.0);
  switch (kind) {
    case LatticeKind::SquareQubit: {
      auto l = from_generator(r2 * Mat::Identity(2, 2), kGramTol, "square");
      l.x_hint = Vec::Unit(2, 0) / r2;
      l.z_hint = Vec::Unit(2, 1) / r2;
      return l;
    }
    case LatticeKind::CanonicalSquare: {
      int n = param >= 1.0 ? static_cast<int>(param) : 1;
      return from_generator(Mat::Identity(2 * n, 2 * n), kGramTol, "canonical-square");
    }
    case LatticeKind::Rectangular: {
      if (!(param > 0.0)) throw Error(ErrorCode::InvalidParameter, "rectangular eta must be > 0");
      Mat m = Mat::Zero(2, 2);
      m(0, 0) = r2 * param;
      m(1, 1) = r2 / param;
      auto l = from_generator(m, kGramTol, "rectangular");
      l.x_hint = Vec::Unit(2, 0) * (param / r2);
      l.z_hint = Vec::Unit(2, 1) / (param * r2);
      return l;
    }
    case LatticeKind::HexQubit: return from_generator(r2 * hex_canonical(), kGramTol, "hex");
    case LatticeKind::CanonicalHex: return from_generator(hex_canonical(), kGramTol, "canonical-hex");
    case LatticeKind::Tesseract: return from_generator(tesseract_generator(), kGramTol, "tesseract");
    case LatticeKind::D4Qubit: {
      auto l = from_generator(d4_checkerboard(), kGramTol, "d4");
      l.x_hint = Vec::Constant(4, 0.5);
      l.z_hint = Vec::Unit(4, 0);
      return l;
    }
    case LatticeKind::CanonicalD4: return from_generator(canonical_d4(), kGramTol, "canonical-d4");
    case LatticeKind::E8: return from_generator(e8_generator(), kGramTol, "e8");
    case LatticeKind::GkpBell:
      return from_generator(beamsplitter(std::numbers::pi / 4.0), kGramTol, "gkp-bell");
  }
  throw Error(ErrorCode::InvalidParameter, "unknown lattice kind");
}

GkpLattice lattice_by_name(const std::string& name, double param) {
  static const std::map<std::string, LatticeKind> kinds = {
      {"square", LatticeKind::SquareQubit},     {"canonical-square", LatticeKind::CanonicalSquare},
      {"rectangular", LatticeKind::Rectangular}, {"hex", LatticeKind::HexQubit},
      {"canonical-hex", LatticeKind::CanonicalHex}, {"tesseract", LatticeKind::Tesseract},
      {"d4", LatticeKind::D4Qubit},              {"canonical-d4", LatticeKind::CanonicalD4},
      {"e8", LatticeKind::E8},                   {"gkp-bell", LatticeKind::GkpBell}};
  auto it = kinds.find(name);
  if (it == kinds.end()) throw Error(ErrorCode::InvalidParameter, "unknown lattice '" + name + "'");
  return standard_lattice(it->second, param);
}

Mat dual(const GkpLattice& l) {
  return l.M * l.A.cast<double>().transpose().inverse();
}

PauliData pauli_data(const GkpLattice& l, int coeff_bound) {
  if (l.d != 2) throw Error(ErrorCode::UnsupportedCodeDimension, "Pauli data needs a qubit code (d = 2)");
  if (coeff_bound < 1) throw Error(ErrorCode::InvalidParameter, "coeff_bound must be >= 1");
  Mat ms = dual(l);
  Mat basis = lll_reduce(ms);
  CosetMinima a = coset_minima(l, basis, coeff_bound);
  CosetMinima b = coset_minima(l, basis, 2 * coeff_bound);
  if (a.best.size() != 3 || b.best.size() != 3)
    throw Error(ErrorCode::SearchBoundTooSmall, "did not find all three logical cosets");
  for (const auto& [key, v] : a.best)
    if (std::abs(v.norm() - b.best.at(key).norm()) > 1e-12)
      throw Error(ErrorCode::SearchBoundTooSmall, "shortest coset vector changed when the bound doubled");

  Mat minv = l.M.inverse();
  unsigned kx = 0, kz = 0;
  if (l.x_hint && l.z_hint) {
    kx = coset_key(minv * *l.x_hint);
    kz = coset_key(minv * *l.z_hint);
  } else {
    for (int j = 0; j + 1 < ms.cols(); j += 2) {
      unsigned kq = coset_key(minv * ms.col(j + 1)), kp = coset_key(minv * ms.col(j));
      if (kq && kp && kq != kp) {
        kx = kq;
        kz = kp;
        break;
      }
    }
    if (!kx) {
      auto it = a.best.begin();
      kx = it->first;
      kz = (++it)->first;
    }
  }
  unsigned ky = kx ^ kz;
  if (!a.best.count(kx) || !a.best.count(kz) || !a.best.count(ky) || kx == kz)
    throw Error(ErrorCode::NotInDual, "logical representatives are not distinct nontrivial cosets");
  PauliData pd;
  pd.x_vec = a.best.at(kx);
  pd.y_vec = a.best.at(ky);
  pd.z_vec = a.best.at(kz);
  pd.dx = pd.x_vec.norm();
  pd.dy = pd.y_vec.norm();
  pd.dz = pd.z_vec.norm();
  return pd;
}

Vec syndrome(const GkpLattice& l, const Vec& e) {
  if (e.size() != l.M.rows()) throw Error(ErrorCode::InvalidDimension, "displacement has wrong dimension");
  Vec s = l.M.transpose() * omega(l.n_modes) * e;
  for (int i = 0; i < s.size(); ++i) s(i) = centered_mod(s(i), kEll);
  return s;
}

const char* pauli_name(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Y: return "Y";
    case Pauli::Z: return "Z";
  }
  return "?";
}

CosetClassifier::CosetClassifier(const GkpLattice& l, int coeff_bound)
    : minv_(l.M.inverse()), pd_(pauli_data(l, coeff_bound)) {
  reps_[0] = minv_ * pd_.x_vec;
  reps_[1] = minv_ * pd_.y_vec;
  reps_[2] = minv_ * pd_.z_vec;
}

Pauli CosetClassifier::operator()(const Vec& r, double tol) const {
  Vec c = minv_ * (r / kEll);
  if (near_integer(c, tol)) return Pauli::I;
  static constexpr Pauli order[3] = {Pauli::X, Pauli::Y, Pauli::Z};
  for (int j = 0; j < 3; ++j)
    if (near_integer(c - reps_[j], tol)) return order[j];
  throw Error(ErrorCode::NotInDual, "residual is not a dual-lattice vector");
}

Pauli classify_residual(const GkpLattice& l, const Vec& r, double tol) {
  return CosetClassifier(l)(r, tol);
}

GkpLattice concatenate(const Mat& inner, const MatI& outer, bool reduce) {
  if (inner.rows() != 2 || inner.cols() != 2)
    throw Error(ErrorCode::ConcatenationInvalid, "inner code must be a single-mode 2x2 generator");
  GkpLattice in = from_generator(inner);
  if (in.d != 2) throw Error(ErrorCode::ConcatenationInvalid, "inner code must encode a qubit");
  MatI two_omega = 2 * omega(1).cast<int>();
  if (in.A != two_omega && in.A != -two_omega)
    throw Error(ErrorCode::ConcatenationInvalid, "inner Gram matrix must be +-2*Omega");
  if (outer.cols() % 2 != 0 || outer.cols() == 0)
    throw Error(ErrorCode::ConcatenationInvalid, "outer stabilizer matrix needs 2n columns");
  const int n = static_cast<int>(outer.cols() / 2);
  const int r = static_cast<int>(outer.rows());
  if (r > n) throw Error(ErrorCode::ConcatenationInvalid, "more stabilizers than qubits");
  const int k = n - r;

  // Columns are stabilizers; reduce over GF(2) so the earliest independent
  // rows carry an identity pivot block.
  MatI g(2 * n, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < 2 * n; ++j) g(j, i) = ((outer(i, j) % 2) + 2) % 2;
  std::vector<int> pivot_rows;
  std::vector<bool> is_pivot(2 * n, false);
  int assigned = 0;
  for (int row = 0; row < 2 * n && assigned < r; ++row) {
    int col = -1;
    for (int c = assigned; c < r; ++c)
      if (g(row, c)) { col = c; break; }
    if (col < 0) continue;
    g.col(assigned).swap(g.col(col));
    for (int c = 0; c < r; ++c)
      if (c != assigned && g(row, c))
        for (int i = 0; i < 2 * n; ++i) g(i, c) ^= g(i, assigned);
    pivot_rows.push_back(row);
    is_pivot[row] = true;
    ++assigned;
  }
  if (assigned < r) throw Error(ErrorCode::ConcatenationInvalid, "outer stabilizers are dependent mod 2");

  Mat t = Mat::Zero(2 * n, 2 * n);
  t.leftCols(r) = g.cast<double>();
  int c = r;
  for (int row = 0; row < 2 * n; ++row)
    if (!is_pivot[row]) t(row, c++) = 2.0;
  Mat lblock = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) lblock.block(2 * i, 2 * i, 2, 2) = inner / 2.0;
  Mat mf = lblock * t;
  if (reduce) mf = lll_reduce(mf);

  GkpLattice out;
  try {
    out = from_generator(mf, kGramTol, "concatenated");
  } catch (const Error& e) {
    throw Error(ErrorCode::ConcatenationInvalid, std::string("outer stabilizers do not commute: ") + e.what());
  }
  if (std::abs(std::abs(mf.determinant()) - std::ldexp(1.0, k)) > 1e-8 * std::ldexp(1.0, k))
    throw Error(ErrorCode::ConcatenationInvalid, "|det M_final| != 2^k");
  return out;
}

Mat lll_reduce(const Mat& m, double delta) {
  if (!(delta > 0.25 && delta < 1.0)) throw Error(ErrorCode::InvalidParameter, "LLL delta must lie in (1/4, 1)");
  const int n = static_cast<int>(m.cols());
  if (m.rows() < n || n == 0) throw Error(ErrorCode::SingularBasis, "basis must have full column rank");
  Eigen::FullPivLU<Mat> lu(m);
  if (lu.rank() < n) throw Error(ErrorCode::SingularBasis, "basis columns are linearly dependent");

  Mat u = Mat::Identity(n, n);  // integer transform, kept exact in doubles
  Mat b = m;
  Mat bs(m.rows(), n);
  Mat mu = Mat::Zero(n, n);
  Vec bn(n);
  auto gram_schmidt = [&]() {
    for (int i = 0; i < n; ++i) {
      bs.col(i) = b.col(i);
      for (int j = 0; j < i; ++j) {
        mu(i, j) = b.col(i).dot(bs.col(j)) / bn(j);
        bs.col(i) -= mu(i, j) * bs.col(j);
      }
      bn(i) = bs.col(i).squaredNorm();
    }
  };
  gram_schmidt();
  int k = 1;
  long guard = 0;
  while (k < n) {
    if (++guard > 1000000) throw Error(ErrorCode::NumericalInstability, "LLL did not terminate");
    for (int j = k - 1; j >= 0; --j) {
      double q = std::round(mu(k, j));
      if (std::abs(mu(k, j)) > 0.5 + 1e-9 && q != 0.0) {
        u.col(k) -= q * u.col(j);
        b.col(k) = m * u.col(k);
        gram_schmidt();
      }
    }
    if (bn(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bn(k - 1)) {
      ++k;
    } else {
      u.col(k).swap(u.col(k - 1));
      b.col(k).swap(b.col(k - 1));
      gram_schmidt();
      k = std::max(k - 1, 1);
    }
  }
  return m * u;
}

bool contains_lattice(const Mat& a, const Mat& b, double tol) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) return false;
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) return false;
  return near_integer(lu.solve(b), tol);
}

bool same_lattice(const Mat& a, const Mat& b, double tol) {
  return contains_lattice(a, b, tol) && contains_lattice(b, a, tol);
}

}  // namespace gkp
