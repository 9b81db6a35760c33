#include "gkp/qubit_mc.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <random>

#include "gkp/kernels.hpp"
#include "gkp/rng.hpp"

namespace gkp {

ErrorRates pauli_error_prob(const GkpLattice& l, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma must be > 0");
  PauliData pd = pauli_data(l);
  auto p = [&](double dist) { return std::erfc(std::sqrt(kEll * kEll * dist * dist / (8.0 * sigma * sigma))); };
  ErrorRates r;
  r.p_x = p(pd.dx);
  r.p_y = p(pd.dy);
  r.p_z = p(pd.dz);
  r.p_e = std::clamp(r.p_x + r.p_y + r.p_z, 0.0, 1.0);
  return r;
}

ClosestPoint::ClosestPoint(const Mat& basis, int bound) : basis_(basis), bound_(bound) {
  if (basis.rows() != basis.cols()) throw Error(ErrorCode::InvalidDimension, "basis must be square");
  if (bound < 1) throw Error(ErrorCode::InvalidParameter, "coeff_bound must be >= 1");
  Eigen::FullPivLU<Mat> lu(basis);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularBasis, "decoding basis is singular");
  inv_ = lu.inverse();
  dim_ = static_cast<int>(basis.rows());
  const int side = 2 * bound + 1;
  double total = std::pow(static_cast<double>(side), dim_);
  if (total > 5e7) throw Error(ErrorCode::InvalidParameter, "enumeration box too large");
  count_ = static_cast<int>(total);
  stride_ = kernels::padded(count_);
  cand_.assign(static_cast<std::size_t>(dim_) * stride_, 0.0);
  half_norm_.assign(stride_, std::numeric_limits<double>::infinity());
  offsets_.resize(static_cast<std::size_t>(dim_) * count_);
  Eigen::VectorXi b = Eigen::VectorXi::Constant(dim_, -bound);
  for (int k = 0; k < count_; ++k) {
    Vec v = basis * b.cast<double>();
    for (int d = 0; d < dim_; ++d) {
      cand_[static_cast<std::size_t>(d) * stride_ + k] = v(d);
      offsets_[static_cast<std::size_t>(k) * dim_ + d] = b(d);
    }
    half_norm_[k] = 0.5 * v.squaredNorm();
    int i = dim_ - 1;
    while (i >= 0 && b(i) == bound) b(i--) = -bound;
    if (i >= 0) ++b(i);
  }
}

Vec ClosestPoint::nearest(const Vec& e, Eigen::VectorXi* coeff) const {
  if (e.size() != dim_) throw Error(ErrorCode::InvalidDimension, "point has wrong dimension");
  Eigen::VectorXi a0 = (inv_ * e).array().round().cast<int>().matrix();
  Vec r = e - basis_ * a0.cast<double>();
  int k = kernels::argmin_distance(r.data(), cand_.data(), half_norm_.data(), dim_, count_, stride_);
  const int* off = offsets_.data() + static_cast<std::size_t>(k) * dim_;
  Eigen::VectorXi a = a0;
  for (int d = 0; d < dim_; ++d) {
    if (std::abs(off[d]) >= bound_)
      throw Error(ErrorCode::SearchBoundTooSmall, "closest point lies on the enumeration boundary");
    a(d) += off[d];
  }
  if (coeff) *coeff = a;
  return basis_ * a.cast<double>();
}

int default_coeff_bound(const Mat& basis_unitless, double sigma) {
  const double n = static_cast<double>(basis_unitless.rows());
  Eigen::JacobiSVD<Mat> svd(basis_unitless);
  double inv_norm = 1.0 / svd.singularValues().minCoeff();
  return static_cast<int>(std::ceil(3.0 * sigma * std::sqrt(n) / kEll * inv_norm)) + 2;
}

Vec cvp_decode(const GkpLattice& l, const Vec& e, int coeff_bound) {
  return ClosestPoint(kEll * l.M, coeff_bound).nearest(e);
}

namespace {

double wilson_se(long k, long n) {
  if (n <= 0) return 0.0;
  double nn = static_cast<double>(n), p = static_cast<double>(k) / nn;
  return std::sqrt(p * (1.0 - p) / nn + 1.0 / (4.0 * nn * nn)) / (1.0 + 1.0 / nn);
}

}  // namespace

ErrorRates mc_logical_rates(const GkpLattice& l, double sigma, long trials, std::uint64_t seed,
                            const McOptions& opt) {
  if (trials < 1) throw Error(ErrorCode::InvalidParameter, "trials must be >= 1");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma must be >= 0");
  CosetClassifier classify(l);
  // Syndrome-consistent minimum-norm decoding leaves a residual in ell*L*;
  // search the dual lattice in an LLL-reduced basis.
  Mat dual_basis = lll_reduce(dual(l));
  int bound = opt.coeff_bound > 0 ? opt.coeff_bound : default_coeff_bound(dual_basis, sigma);
  ClosestPoint cvp(kEll * dual_basis, bound);
  const int dim = static_cast<int>(l.M.rows());
  const long chunk = std::max<long>(1, opt.chunk);
  const std::size_t n_chunks = static_cast<std::size_t>((trials + chunk - 1) / chunk);
  std::vector<std::array<long, 3>> tallies(n_chunks, {0, 0, 0});
  parallel_for(n_chunks, opt.threads, [&](std::size_t c) {
    auto rng = make_stream(seed, c);
    std::normal_distribution<double> nd;
    long begin = static_cast<long>(c) * chunk, end = std::min(trials, begin + chunk);
    Vec e(dim);
    auto& t = tallies[c];
    for (long i = begin; i < end; ++i) {
      for (int d = 0; d < dim; ++d) e(d) = sigma * nd(rng);
      Pauli p = classify(cvp.nearest(e));
      if (p == Pauli::X) ++t[0];
      else if (p == Pauli::Y) ++t[1];
      else if (p == Pauli::Z) ++t[2];
    }
  });
  ErrorRates r;
  r.trials = trials;
  for (const auto& t : tallies) {
    r.n_x += t[0];
    r.n_y += t[1];
    r.n_z += t[2];
  }
  const double n = static_cast<double>(trials);
  r.p_x = r.n_x / n;
  r.p_y = r.n_y / n;
  r.p_z = r.n_z / n;
  r.p_e = std::clamp(r.p_x + r.p_y + r.p_z, 0.0, 1.0);
  r.se_x = wilson_se(r.n_x, trials);
  r.se_y = wilson_se(r.n_y, trials);
  r.se_z = wilson_se(r.n_z, trials);
  return r;
}

}  // namespace gkp
