#include "gkp/symplectic.hpp"

#include <algorithm>
#include <set>

namespace gkp {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InvalidGain: return "InvalidGain";
    case ErrorCode::InvalidModes: return "InvalidModes";
    case ErrorCode::InvalidTransmittance: return "InvalidTransmittance";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NotIntegral: return "NotIntegral";
    case ErrorCode::InvalidCodeDimension: return "InvalidCodeDimension";
    case ErrorCode::UnsupportedCodeDimension: return "UnsupportedCodeDimension";
    case ErrorCode::SearchBoundTooSmall: return "SearchBoundTooSmall";
    case ErrorCode::NotInDual: return "NotInDual";
    case ErrorCode::ConcatenationInvalid: return "ConcatenationInvalid";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::NonCanonicalAncilla: return "NonCanonicalAncilla";
    case ErrorCode::NumericalSingularity: return "NumericalSingularity";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::NumericalInstability: return "NumericalInstability";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
  }
  return "Unknown";
}

void require_phase_space_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0)
    throw Error(ErrorCode::InvalidDimension, std::string(what) + " must be square with even size");
}

Mat omega(int n_modes) {
  if (n_modes < 1) throw Error(ErrorCode::InvalidDimension, "omega needs n_modes >= 1");
  Mat w = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    w(2 * i, 2 * i + 1) = 1.0;
    w(2 * i + 1, 2 * i) = -1.0;
  }
  return w;
}

bool is_symplectic(const Mat& s, double tol) {
  require_phase_space_square(s, "symplectic candidate");
  Mat w = omega(static_cast<int>(s.rows() / 2));
  return (s * w * s.transpose() - w).cwiseAbs().maxCoeff() <= tol;
}

Mat rotation(double phi) {
  double c = std::cos(phi), s = std::sin(phi);
  Mat r(2, 2);
  r << c, s, -s, c;
  return r;
}

Mat squeezer(double r) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = std::exp(r);
  m(1, 1) = std::exp(-r);
  return m;
}

Mat beamsplitter(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  Mat b = Mat::Zero(4, 4);
  b.topLeftCorner(2, 2).diagonal().setConstant(c);
  b.bottomRightCorner(2, 2).diagonal().setConstant(c);
  b.topRightCorner(2, 2).diagonal().setConstant(s);
  b.bottomLeftCorner(2, 2).diagonal().setConstant(-s);
  return b;
}

Mat two_mode_squeezer(double gain) {
  if (!(gain >= 1.0)) throw Error(ErrorCode::InvalidGain, "two-mode squeezing gain must be >= 1");
  double a = std::sqrt(gain), b = std::sqrt(gain - 1.0);
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = a;
  m(0, 2) = m(2, 0) = b;
  m(1, 3) = m(3, 1) = -b;
  return m;
}

Mat sum_gate() {
  Mat m = Mat::Identity(4, 4);
  m(1, 3) = -1.0;  // p1 -> p1 - p2
  m(2, 0) = 1.0;   // q2 -> q2 + q1
  return m;
}

Mat embed(const Mat& g, std::span<const int> targets, int n_modes) {
  if (n_modes < 1) throw Error(ErrorCode::InvalidDimension, "n_modes must be >= 1");
  if (g.rows() != g.cols() || g.rows() != 2 * static_cast<long>(targets.size()))
    throw Error(ErrorCode::InvalidDimension, "gate size does not match target count");
  std::set<int> seen;
  for (int t : targets) {
    if (t < 0 || t >= n_modes) throw Error(ErrorCode::InvalidModes, "target mode out of range");
    if (!seen.insert(t).second) throw Error(ErrorCode::InvalidModes, "duplicate target mode");
  }
  Mat s = Mat::Identity(2 * n_modes, 2 * n_modes);
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = 0; j < targets.size(); ++j)
      s.block(2 * targets[i], 2 * targets[j], 2, 2) = g.block(2 * i, 2 * j, 2, 2);
  return s;
}

Mat standard_gate(const Gate& gate, std::span<const int> targets, int n_modes) {
  auto need = [&](std::size_t k) {
    if (targets.size() != k)
      throw Error(ErrorCode::InvalidModes, "gate needs " + std::to_string(k) + " target mode(s)");
  };
  switch (gate.kind) {
    case GateKind::Rotation: need(1); return embed(rotation(gate.param), targets, n_modes);
    case GateKind::Squeeze: need(1); return embed(squeezer(gate.param), targets, n_modes);
    case GateKind::Beamsplitter: need(2); return embed(beamsplitter(gate.param), targets, n_modes);
    case GateKind::TwoModeSqueeze: need(2); return embed(two_mode_squeezer(gate.param), targets, n_modes);
    case GateKind::Sum: need(2); return embed(sum_gate(), targets, n_modes);
    case GateKind::Identity:
      if (n_modes < 1) throw Error(ErrorCode::InvalidDimension, "n_modes must be >= 1");
      return Mat::Identity(2 * n_modes, 2 * n_modes);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown gate");
}

Williamson williamson(const Mat& y) {
  require_phase_space_square(y, "covariance");
  const int dim = static_cast<int>(y.rows());
  const int n = dim / 2;
  if ((y - y.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, y.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotPositiveDefinite, "covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> ey(0.5 * (y + y.transpose()));
  const Vec& lam = ey.eigenvalues();
  if (lam.minCoeff() <= 1e-14 * std::max(1.0, lam.maxCoeff()))
    throw Error(ErrorCode::NotPositiveDefinite, "covariance is singular or indefinite");
  Mat isqrt_y = ey.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                ey.eigenvectors().transpose();

  // K = Y^{-1/2} Omega Y^{-1/2} is antisymmetric; iK is Hermitian with
  // eigenvalues +-k_j, and k_j = 1/nu_j.
  Mat k = isqrt_y * omega(n) * isqrt_y;
  CMat h = cplx(0.0, 1.0) * k.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> eh(h);
  // Eigenvalues ascending: the last n are the positive ones; take largest nu
  // (smallest k) first.
  Mat o(dim, dim);
  Vec nu(dim);
  for (int j = 0; j < n; ++j) {
    int idx = n + j;
    double kj = eh.eigenvalues()(idx);
    CVec v = eh.eigenvectors().col(idx);
    Vec x = std::sqrt(2.0) * v.real();
    Vec yv = std::sqrt(2.0) * v.imag();
    o.col(2 * j) = yv;
    o.col(2 * j + 1) = x;
    nu(2 * j) = nu(2 * j + 1) = 1.0 / kj;
  }
  // Re-orthonormalize within the real basis (modified Gram-Schmidt) so that
  // O is orthogonal to working precision.
  for (int c = 0; c < dim; ++c) {
    for (int p = 0; p < c; ++p) o.col(c) -= o.col(p).dot(o.col(c)) * o.col(p);
    o.col(c).normalize();
  }
  Vec dh = nu.cwiseSqrt();
  Williamson w;
  w.S = dh.asDiagonal() * o.transpose() * isqrt_y;
  w.nu = nu;
  return w;
}

Mat compose(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::InvalidDimension, "compose: size mismatch");
  return a * b;
}

Mat direct_sum(const Mat& a, const Mat& b) {
  Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

Mat apply_to_covariance(const Mat& s, const Mat& y) {
  if (s.cols() != y.rows() || y.rows() != y.cols())
    throw Error(ErrorCode::InvalidDimension, "apply_to_covariance: size mismatch");
  return s * y * s.transpose();
}

}  // namespace gkp
