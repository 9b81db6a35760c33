#include "gkp/o2o.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <random>

#include "gkp/kernels.hpp"
#include "gkp/rng.hpp"
#include "gkp/symplectic.hpp"

namespace gkp {

O2OCode tms_code(const std::vector<double>& gains, const GkpLattice& ancilla) {
  if (ancilla.d != 1) throw Error(ErrorCode::NonCanonicalAncilla, "O2O ancilla lattice must be canonical (d = 1)");
  const int n = static_cast<int>(gains.size()), m = ancilla.n_modes;
  if (n < 1 || m < n) throw Error(ErrorCode::InvalidModes, "need 1 <= N <= M");
  O2OCode code;
  code.n_data = n;
  code.n_ancilla = m;
  code.ancilla = ancilla;
  code.gains = gains;
  code.S_enc = Mat::Identity(2 * (n + m), 2 * (n + m));
  for (int i = 0; i < n; ++i) {
    const int targets[2] = {i, n + i};
    code.S_enc = standard_gate({GateKind::TwoModeSqueeze, gains[i]}, targets, n + m) * code.S_enc;
  }
  return code;
}

O2OCode sq_rep_code(double lambda, double kappa) {
  if (!(lambda > 0.0) || !(kappa > 0.0))
    throw Error(ErrorCode::InvalidParameter, "squeezing-repetition parameters must be positive");
  const double a = kappa / lambda, b = lambda / kappa;
  O2OCode code;
  code.n_data = code.n_ancilla = 1;
  code.ancilla = standard_lattice(LatticeKind::CanonicalSquare, 1);
  code.S_enc.resize(4, 4);
  code.S_enc << a, 0, 0, 0,
                0, b, 0, -lambda,
                lambda, 0, b, 0,
                0, 0, 0, a;
  return code;
}

namespace {

Mat ancilla_map(const O2OCode& code) {
  return code.ancilla.M.transpose() * omega(code.n_ancilla);
}

Mat encoded_covariance(const O2OCode& code, const Mat& y) {
  const int dim = 2 * (code.n_data + code.n_ancilla);
  if (y.rows() != dim || y.cols() != dim)
    throw Error(ErrorCode::InvalidDimension, "noise matrix does not match the code size");
  Eigen::FullPivLU<Mat> lu(code.S_enc);
  if (!lu.isInvertible()) throw Error(ErrorCode::NumericalSingularity, "encoder is singular");
  Mat sinv = lu.inverse();
  Mat vx = sinv * y * sinv.transpose();
  return 0.5 * (vx + vx.transpose());
}

}  // namespace

NoiseBlocks noise_blocks(const O2OCode& code, const Mat& y) {
  const int n2 = 2 * code.n_data, m2 = 2 * code.n_ancilla;
  Mat vx = encoded_covariance(code, y);
  Mat t = Mat::Zero(n2 + m2, n2 + m2);
  t.topLeftCorner(n2, n2).setIdentity();
  t.bottomRightCorner(m2, m2) = ancilla_map(code);
  Mat k = t * vx * t.transpose();
  Eigen::LLT<Mat> llt(0.5 * (k + k.transpose()));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalSingularity, "encoded noise covariance is singular");
  Mat prec = llt.solve(Mat::Identity(n2 + m2, n2 + m2));
  prec = 0.5 * (prec + prec.transpose());
  NoiseBlocks b;
  b.V_d = prec.topLeftCorner(n2, n2);
  b.V_a = prec.bottomRightCorner(m2, m2);
  b.V_da = prec.topRightCorner(n2, m2);
  Eigen::LDLT<Mat> vd(b.V_d);
  if (vd.info() != Eigen::Success) throw Error(ErrorCode::NumericalSingularity, "V_d is singular");
  Mat vdga = b.V_a - b.V_da.transpose() * vd.solve(b.V_da);
  b.V_d_given_a = 0.5 * (vdga + vdga.transpose());
  return b;
}

SyndromeEstimator::SyndromeEstimator(const NoiseBlocks& blocks, const Estimator& est)
    : kind_(est.kind) {
  if (est.kind == EstimatorKind::Mmse && est.n_max < 1)
    throw Error(ErrorCode::InvalidParameter, "MMSE truncation n_max must be >= 1");
  B_ = -blocks.V_d.ldlt().solve(blocks.V_da);
  V_ = blocks.V_d_given_a;
  sdim_ = static_cast<int>(V_.rows());
  if (kind_ == EstimatorKind::Linear) return;
  build_terms(est.n_max);
  if (!est.auto_n_max) return;
  // Quasi-random syndromes over the cell (additive recurrence).
  const int probes = 64;
  auto probe = [&](int i, int j) {
    double alpha = std::fmod(std::sqrt(2.0 + j) * (i + 1) + 0.5 * j, 1.0);
    return (alpha - 0.5) * kEll;
  };
  for (int n = est.n_max; n < 12; ++n) {
    std::vector<Vec> cur;
    Vec s(sdim_);
    for (int i = 0; i < probes; ++i) {
      for (int j = 0; j < sdim_; ++j) s(j) = probe(i, j);
      cur.push_back((*this)(s));
    }
    SyndromeEstimator wider = *this;
    wider.build_terms(n + 1);
    double diff = 0.0;
    for (int i = 0; i < probes; ++i) {
      for (int j = 0; j < sdim_; ++j) s(j) = probe(i, j);
      diff = std::max(diff, (wider(s) - cur[i]).cwiseAbs().maxCoeff());
    }
    if (diff < 1e-4) return;
    *this = wider;
  }
}

void SyndromeEstimator::build_terms(int n_max) {
  n_max_ = n_max;
  const double bound_scale = std::sqrt(std::numbers::pi / 2.0);
  std::vector<Eigen::VectorXi> keep;
  std::vector<Vec> us;
  std::vector<double> cs;
  Eigen::VectorXi n = Eigen::VectorXi::Constant(sdim_, -n_max);
  while (true) {
    Vec nd = n.cast<double>();
    Vec u = kEll * (V_ * nd);
    double c = 0.5 * kEll * kEll * nd.dot(V_ * nd);
    if (u.cwiseAbs().sum() * bound_scale - c >= -60.0) {
      keep.push_back(n);
      us.push_back(u);
      cs.push_back(c);
    }
    int i = sdim_ - 1;
    while (i >= 0 && n(i) == n_max) n(i--) = -n_max;
    if (i < 0) break;
    ++n(i);
  }
  count_ = static_cast<int>(keep.size());
  stride_ = kernels::padded(count_);
  u_.assign(static_cast<std::size_t>(sdim_) * stride_, 0.0);
  n_.assign(static_cast<std::size_t>(sdim_) * stride_, 0.0);
  c_.assign(stride_, std::numeric_limits<double>::infinity());
  for (int k = 0; k < count_; ++k) {
    for (int d = 0; d < sdim_; ++d) {
      u_[static_cast<std::size_t>(d) * stride_ + k] = us[k](d);
      n_[static_cast<std::size_t>(d) * stride_ + k] = keep[k](d);
    }
    c_[k] = cs[k];
  }
}

void SyndromeEstimator::operator()(const double* s, double* out) const {
  Eigen::Map<const Vec> sv(s, sdim_);
  Eigen::Map<Vec> ov(out, B_.rows());
  if (kind_ == EstimatorKind::Linear) {
    ov.noalias() = B_ * sv;
    return;
  }
  double nbar[16];
  std::vector<double> heap;
  double* nb = nbar;
  if (sdim_ > 16) {
    heap.resize(sdim_);
    nb = heap.data();
  }
  kernels::softmax_mean(s, u_.data(), c_.data(), n_.data(), sdim_, sdim_, count_, stride_, nb);
  double shifted[16];
  std::vector<double> heap2;
  double* sh = shifted;
  if (sdim_ > 16) {
    heap2.resize(sdim_);
    sh = heap2.data();
  }
  for (int d = 0; d < sdim_; ++d) sh[d] = s[d] - kEll * nb[d];
  ov.noalias() = B_ * Eigen::Map<const Vec>(sh, sdim_);
}

Vec SyndromeEstimator::operator()(const Vec& s) const {
  if (s.size() != sdim_) throw Error(ErrorCode::InvalidDimension, "syndrome has wrong dimension");
  Vec out(B_.rows());
  (*this)(s.data(), out.data());
  return out;
}

Vec estimate(const NoiseBlocks& blocks, const Vec& s, const Estimator& est) {
  return SyndromeEstimator(blocks, est)(s);
}

namespace {

long chunk_size(long trials) { return std::clamp<long>(trials / 64, 512, 16384); }

struct ChunkTally {
  Mat sum;  // weighted second moments
  long n = 0;
};

OutputNoise finish(const std::vector<ChunkTally>& tallies, const Mat& offset, int n2, long trials) {
  Mat total = Mat::Zero(n2, n2);
  long n = 0;
  for (const auto& t : tallies) {
    total += t.sum;
    n += t.n;
  }
  OutputNoise out;
  out.trials = trials;
  out.V_out = offset + total / static_cast<double>(n);
  out.V_out = 0.5 * (out.V_out + out.V_out.transpose());
  out.rms_sq = out.V_out.trace() / n2;
  double det = out.V_out.determinant();
  out.gm_sq = det > 0.0 ? std::pow(det, 1.0 / n2) : 0.0;
  const std::size_t k = tallies.size();
  if (k >= 2) {
    double tr_all = total.trace();
    std::vector<double> theta(k);
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double tr = tr_all - tallies[i].sum.trace();
      double cnt = static_cast<double>(n - tallies[i].n);
      theta[i] = (offset.trace() + tr / cnt) / n2;
      mean += theta[i];
    }
    mean /= static_cast<double>(k);
    double var = 0.0;
    for (double t : theta) var += (t - mean) * (t - mean);
    out.stderr_rms_sq = std::sqrt(var * static_cast<double>(k - 1) / static_cast<double>(k));
  }
  return out;
}

}  // namespace

OutputNoise mc_output(const O2OCode& code, const Mat& y, const Estimator& est, long trials,
                      std::uint64_t seed, const MonteCarloOptions& opt) {
  if (trials < 1000) throw Error(ErrorCode::InvalidParameter, "mc_output needs at least 1000 trials");
  const int n2 = 2 * code.n_data, m2 = 2 * code.n_ancilla;
  NoiseBlocks blocks = noise_blocks(code, y);
  SyndromeEstimator f(blocks, est);
  Mat vx = encoded_covariance(code, y);
  Mat pmap = ancilla_map(code);
  const long chunk = chunk_size(trials);
  const std::size_t n_chunks = static_cast<std::size_t>((trials + chunk - 1) / chunk);
  std::vector<ChunkTally> tallies(n_chunks);

  if (opt.sampler == Sampler::Direct) {
    Eigen::FullPivLU<Mat> lu(code.S_enc);
    Mat sinv = lu.inverse();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (y + y.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
      throw Error(ErrorCode::NotPositiveDefinite, "noise matrix is not PSD");
    Mat factor = sinv * es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const int dim = n2 + m2;
    parallel_for(n_chunks, opt.threads, [&](std::size_t c) {
      auto rng = make_stream(seed, c);
      std::normal_distribution<double> nd;
      long begin = static_cast<long>(c) * chunk, end = std::min(trials, begin + chunk);
      Vec z(dim), x(dim), u(m2), s(m2), fs(n2), xo(n2);
      Mat acc = Mat::Zero(n2, n2);
      for (long i = begin; i < end; ++i) {
        for (int d = 0; d < dim; ++d) z(d) = nd(rng);
        x.noalias() = factor * z;
        u.noalias() = pmap * x.tail(m2);
        for (int d = 0; d < m2; ++d) s(d) = centered_mod(u(d), kEll);
        f(s.data(), fs.data());
        xo = x.head(n2) - fs;
        acc.noalias() += xo * xo.transpose();
      }
      tallies[c] = {acc, end - begin};
    });
    return finish(tallies, Mat::Zero(n2, n2), n2, trials);
  }

  // Conditional sampler: draw only the ancilla noise x_a from a defensive
  // mixture, and add the exact Gaussian conditional moments of x_d.
  Mat sig_a = vx.bottomRightCorner(m2, m2), sig_da = vx.topRightCorner(n2, m2);
  Eigen::LLT<Mat> la(sig_a);
  if (la.info() != Eigen::Success) throw Error(ErrorCode::NumericalSingularity, "ancilla noise covariance is singular");
  Mat lfac = la.matrixL();
  Mat gmap = la.solve(sig_da.transpose()).transpose();  // Sigma_da Sigma_a^{-1}
  Mat cond = vx.topLeftCorner(n2, n2) - gmap * sig_da.transpose();
  cond = 0.5 * (cond + cond.transpose());
  const double k = opt.mixture_scale;
  const double kpow = std::pow(k, -static_cast<double>(m2));
  const double quad = 0.5 * (1.0 - 1.0 / (k * k));
  parallel_for(n_chunks, opt.threads, [&](std::size_t c) {
    auto rng = make_stream(seed, c);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;
    long begin = static_cast<long>(c) * chunk, end = std::min(trials, begin + chunk);
    Vec z(m2), xa(m2), u(m2), s(m2), fs(n2), g(n2);
    Mat acc = Mat::Zero(n2, n2);
    for (long i = begin; i < end; ++i) {
      double scale = ud(rng) < 0.5 ? 1.0 : k;
      for (int d = 0; d < m2; ++d) z(d) = scale * nd(rng);
      double w = k == 1.0 ? 1.0 : 1.0 / (0.5 + 0.5 * kpow * std::exp(quad * z.squaredNorm()));
      xa.noalias() = lfac * z;
      u.noalias() = pmap * xa;
      for (int d = 0; d < m2; ++d) s(d) = centered_mod(u(d), kEll);
      f(s.data(), fs.data());
      g.noalias() = gmap * xa;
      g -= fs;
      acc.noalias() += w * (g * g.transpose());
    }
    tallies[c] = {acc, end - begin};
  });
  return finish(tallies, cond, n2, trials);
}

GainResult optimize_gain(const TmsFamily& family, double sigma, const Estimator& est, long trials,
                         std::uint64_t seed, const MonteCarloOptions& opt, const GainSearch& search) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma must be > 0");
  const int dim = 2 * (family.n_data + family.ancilla.n_modes);
  const Mat y = sigma * sigma * Mat::Identity(dim, dim);
  const double gmax = search.g_max > 1.0 ? search.g_max : std::max(10.0, 4.0 / (sigma * sigma));
  GainResult best;
  best.noise.rms_sq = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> seen;
  auto eval = [&](double lg) {
    double gain = std::exp(lg);
    for (const auto& [g, v] : seen)
      if (g == lg) return v;
    O2OCode code = tms_code(std::vector<double>(family.n_data, gain), family.ancilla);
    OutputNoise out = mc_output(code, y, est, trials, seed, opt);
    ++best.evaluations;
    if (out.rms_sq < best.noise.rms_sq) {
      best.noise = out;
      best.gain = gain;
    }
    seen.emplace_back(lg, out.rms_sq);
    return out.rms_sq;
  };
  const int grid = std::max(3, search.grid);
  const double lmax = std::log(gmax);
  std::vector<double> lg(grid), val(grid);
  for (int i = 0; i < grid; ++i) {
    lg[i] = lmax * i / (grid - 1);
    val[i] = eval(lg[i]);
  }
  int ib = static_cast<int>(std::min_element(val.begin(), val.end()) - val.begin());
  double a = lg[std::max(ib - 1, 0)], b = lg[std::min(ib + 1, grid - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  while (b - a > search.rel_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = eval(x2);
    }
  }
  const double lb = std::log(best.gain);
  best.at_boundary = lb <= search.rel_tol || lb >= lmax - search.rel_tol;
  return best;
}

LowerBound sigma_lower_bound(const std::vector<double>& sigmas, int n_data) {
  if (n_data < 1 || sigmas.empty()) throw Error(ErrorCode::InvalidParameter, "need N >= 1 and at least one sigma");
  LowerBound lb;
  double logp = 0.0;
  for (double s : sigmas) {
    double v = s * s;
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma must be > 0");
    if (v >= 1.0) {
      lb.vacuous = true;
      return lb;
    }
    logp += std::log(v / (1.0 - v));
  }
  lb.sigma_lb = std::exp(-0.5 + logp / (2.0 * n_data));
  return lb;
}

double no_threshold_rhs(const std::vector<double>& gains, double sigma) {
  if (gains.empty()) throw Error(ErrorCode::InvalidParameter, "need at least one gain");
  double sum = 0.0;
  for (double g : gains) {
    if (!(g >= 1.0)) throw Error(ErrorCode::InvalidGain, "gain must be >= 1");
    sum += std::isinf(g) ? 0.0 : sigma * sigma / (2.0 * g - 1.0);
  }
  return sum / static_cast<double>(gains.size());
}

double breakeven(const TmsFamily& family, const Estimator& est, long trials, std::uint64_t seed,
                 const MonteCarloOptions& opt, const BreakevenOptions& bopt) {
  double lo = bopt.lo, hi = bopt.hi;
  auto has_gain = [&](double sigma) {
    GainResult r = optimize_gain(family, sigma, est, trials, seed, opt);
    return r.noise.rms_sq < sigma * sigma * (1.0 - 1e-9);
  };
  while (hi - lo > bopt.tol) {
    double mid = 0.5 * (lo + hi);
    if (has_gain(mid)) lo = mid;
    else hi = mid;
  }
  return std::min(0.5 * (lo + hi), 1.0 / std::numbers::sqrt2);
}

double tms_linear_asymptotic(double sigma) {
  double s4 = std::pow(sigma, 4);
  return 4.0 * s4 / std::numbers::pi * std::log(std::pow(std::numbers::pi, 1.5) / (2.0 * s4));
}

}  // namespace gkp
