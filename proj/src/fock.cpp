#include "gkp/fock.hpp"

#include <algorithm>
#include <limits>

namespace gkp::fock {

namespace {

constexpr cplx kI{0.0, 1.0};

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// exp(i c H x P) for Hermitian H and a Pauli P (P^2 = I).
CMat exp_coupled(const CMat& h, const CMat& pauli, double c) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  const Vec& lam = es.eigenvalues();
  CVec cs(lam.size()), sn(lam.size());
  for (int i = 0; i < lam.size(); ++i) {
    cs(i) = std::cos(c * lam(i));
    sn(i) = std::sin(c * lam(i));
  }
  const CMat& v = es.eigenvectors();
  CMat cosh_ = v * cs.asDiagonal() * v.adjoint();
  CMat sinh_ = v * sn.asDiagonal() * v.adjoint();
  return kron(cosh_, CMat::Identity(2, 2)) + kI * kron(sinh_, pauli);
}

void check_dim(int dim, int min_dim = 2) {
  if (dim < min_dim) throw Error(ErrorCode::InvalidDimension, "Fock dimension too small");
}

}  // namespace

Ops operators(int dim) {
  check_dim(dim);
  Ops o;
  o.a = CMat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) o.a(n - 1, n) = std::sqrt(static_cast<double>(n));
  o.adag = o.a.adjoint();
  o.n = CMat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) o.n(n, n) = n;
  o.q = (o.a + o.adag) / std::sqrt(2.0);
  o.p = -kI * (o.a - o.adag) / std::sqrt(2.0);
  return o;
}

CMat displacement_op(cplx alpha, int dim) {
  check_dim(dim, 1);
  CMat m = CMat::Zero(dim, dim);
  const double x = std::norm(alpha);
  if (x == 0.0) return CMat::Identity(dim, dim);
  const cplx ph = alpha / std::abs(alpha);
  const cplx phm = -std::conj(ph);
  // Along each diagonal offset d, h_n = <n+d|D|n> / ph^d follows a stable
  // three-term recurrence of normalized associated Laguerre polynomials.
  std::vector<double> h(dim);
  cplx phd = 1.0, phmd = 1.0;
  for (int d = 0; d < dim; ++d) {
    const int cnt = dim - d;
    h[0] = std::exp(-0.5 * x + 0.5 * d * std::log(x) - 0.5 * std::lgamma(d + 1.0));
    if (cnt > 1) h[1] = h[0] * (1.0 + d - x) / std::sqrt(d + 1.0);
    for (int n = 1; n + 1 < cnt; ++n)
      h[n + 1] = ((2.0 * n + 1.0 + d - x) * h[n] - std::sqrt(static_cast<double>(n) * (n + d)) * h[n - 1]) /
                 std::sqrt((n + 1.0) * (n + 1.0 + d));
    for (int n = 0; n < cnt; ++n) {
      m(n + d, n) = h[n] * phd;
      if (d > 0) m(n, n + d) = h[n] * phmd;
    }
    phd *= ph;
    phmd *= phm;
  }
  return m;
}

CMat finite_energy_displacement(cplx alpha, double delta, int dim) {
  CMat m = displacement_op(alpha, dim);
  const double t = delta * delta;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) *= std::exp(t * (j - i));
  return m;
}

std::vector<double> hermite_functions(double x, int count) {
  std::vector<double> psi(std::max(count, 1));
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (count > 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 1; n + 1 < count; ++n)
    psi[n + 1] = std::sqrt(2.0 / (n + 1.0)) * x * psi[n] - std::sqrt(n / (n + 1.0)) * psi[n - 1];
  psi.resize(count);
  return psi;
}

cplx wavefunction(const CVec& psi, double x) {
  auto h = hermite_functions(x, static_cast<int>(psi.size()));
  cplx s = 0.0;
  for (int n = 0; n < psi.size(); ++n) s += psi(n) * h[n];
  return s;
}

GkpState gkp_state(const GkpFockParams& params) {
  if (!(params.delta > 0.0)) throw Error(ErrorCode::InvalidParameter, "Delta must be > 0");
  check_dim(params.dim);
  const int ext = params.dim + 60;
  const double spacing = params.logical == Logical::Canonical ? kEll : 2.0 * kSqrtPi;
  const double offset = params.logical == Logical::One ? kSqrtPi : 0.0;
  const double reach = std::sqrt(2.0 * ext + 1.0) + 8.0;
  const int t_max = params.t_max > 0 ? params.t_max : static_cast<int>(std::ceil(reach / spacing)) + 1;
  CVec c = CVec::Zero(ext);
  const double d2 = params.delta * params.delta;
  if (params.form == StateForm::Envelope) {
    // E_Delta applied to the ideal comb: Fock amplitudes e^{-Delta^2 n} sum_t psi_n(x_t).
    for (int t = -t_max; t <= t_max; ++t) {
      auto h = hermite_functions(offset + spacing * t, ext);
      for (int n = 0; n < ext; ++n) c(n) += h[n];
    }
    for (int n = 0; n < ext; ++n) c(n) *= std::exp(-d2 * n);
  } else {
    // Gaussian peaks of width Delta under a Gaussian envelope of width 1/Delta,
    // projected onto Hermite functions by quadrature.
    const double step = params.delta / 12.0;
    const double lim = reach + 4.0;
    for (double x = -lim; x <= lim; x += step) {
      double amp = 0.0;
      for (int t = -t_max; t <= t_max; ++t) {
        double xt = offset + spacing * t;
        amp += std::exp(-0.5 * d2 * xt * xt - 0.5 * (x - xt) * (x - xt) / d2);
      }
      if (amp == 0.0) continue;
      auto h = hermite_functions(x, ext);
      for (int n = 0; n < ext; ++n) c(n) += amp * h[n] * step;
    }
  }
  c /= c.norm();
  GkpState out;
  out.leakage = c.tail(ext - (params.dim - 5)).squaredNorm();
  if (out.leakage > 1e-6)
    throw Error(ErrorCode::TruncationTooSmall,
                "GKP state leaks " + std::to_string(out.leakage) + " above level dim-5");
  out.psi = c.head(params.dim);
  out.psi /= out.psi.norm();
  return out;
}

namespace {

double parity_expectation(const CVec& displaced) {
  double w = 0.0;
  for (int n = 0; n < displaced.size(); ++n) w += (n % 2 ? -1.0 : 1.0) * std::norm(displaced(n));
  return w;
}

Mat wigner_mixture(const std::vector<CVec>& states, const std::vector<double>& weights,
                   const std::vector<double>& qs, const std::vector<double>& ps) {
  const int dim = static_cast<int>(states.front().size());
  Mat w(qs.size(), ps.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      cplx alpha(qs[i] / std::sqrt(2.0), ps[j] / std::sqrt(2.0));
      const int ext = dim + static_cast<int>(std::ceil(4.0 * std::norm(alpha) + 8.0 * std::abs(alpha))) + 20;
      CMat d = displacement_op(-alpha, ext);
      double acc = 0.0;
      for (std::size_t k = 0; k < states.size(); ++k) {
        CVec padded = CVec::Zero(ext);
        padded.head(dim) = states[k];
        acc += weights[k] * parity_expectation(d * padded);
      }
      w(i, j) = acc / std::numbers::pi;
    }
  }
  return w;
}

}  // namespace

Mat wigner(const CVec& psi, const std::vector<double>& qs, const std::vector<double>& ps) {
  return wigner_mixture({psi}, {1.0}, qs, ps);
}

Mat wigner(const CMat& rho, const std::vector<double>& qs, const std::vector<double>& ps) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()));
  std::vector<CVec> states;
  std::vector<double> weights;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    if (std::abs(es.eigenvalues()(k)) < 1e-12) continue;
    states.push_back(es.eigenvectors().col(k));
    weights.push_back(es.eigenvalues()(k));
  }
  if (states.empty()) return Mat::Zero(qs.size(), ps.size());
  return wigner_mixture(states, weights, qs, ps);
}

CMat generalized_pauli(Axis axis, int dim) {
  check_dim(dim);
  Ops o = operators(dim);
  auto f = [](double x) { return std::cos(kSqrtPi * x) >= 0.0 ? 1.0 : -1.0; };
  return spectral(axis == Axis::Z ? o.q : o.p, f);
}

SbsRound sbs_round(Axis axis, double delta, int dim) {
  check_dim(dim);
  Ops o = operators(dim);
  CMat sx(2, 2), sy(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -kI, kI, 0;
  const double eps = 0.5 * kSqrtPi * delta * delta;
  CMat small, big;
  if (axis == Axis::X) {
    small = exp_coupled(o.q, sy, eps);
    big = exp_coupled(o.p, sx, kSqrtPi);
  } else {
    small = exp_coupled(o.p, sy, eps);
    big = exp_coupled(o.q, sx, -kSqrtPi);
  }
  SbsRound r;
  r.U = small * big * small;
  const int g = 1, e = 0;
  r.K_g.resize(dim, dim);
  r.K_e.resize(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      r.K_g(i, j) = r.U(2 * i + g, 2 * j + g);
      r.K_e(i, j) = r.U(2 * i + e, 2 * j + g);
    }
  CMat comp = r.K_g.adjoint() * r.K_g + r.K_e.adjoint() * r.K_e;
  double err = (comp - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (err > 1e-9) throw Error(ErrorCode::TruncationTooSmall, "sBs Kraus operators are not complete");
  return r;
}

CMat apply_kraus(const CMat& rho, const std::vector<CMat>& kraus) {
  CMat out = CMat::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

double mean_photon(const CMat& rho) {
  double s = 0.0;
  for (int n = 0; n < rho.rows(); ++n) s += n * rho(n, n).real();
  return s;
}

CMat projector(const CVec& psi) { return psi * psi.adjoint(); }

std::vector<SbsPoint> evolve_sbs(CMat rho, double delta, int rounds) {
  const int dim = static_cast<int>(rho.rows());
  SbsRound rx = sbs_round(Axis::X, delta, dim), rz = sbs_round(Axis::Z, delta, dim);
  const std::vector<CMat> kx{rx.K_g, rx.K_e}, kz{rz.K_g, rz.K_e};
  CMat sq = finite_energy_displacement(stabilizer_q_alpha(), delta, dim);
  CMat sp = finite_energy_displacement(stabilizer_p_alpha(), delta, dim);
  CMat sq0 = displacement_op(stabilizer_q_alpha(), dim);
  CMat sp0 = displacement_op(stabilizer_p_alpha(), dim);
  CMat zl = generalized_pauli(Axis::Z, dim), xl = generalized_pauli(Axis::X, dim);
  std::vector<SbsPoint> traj;
  auto record = [&](int r) {
    traj.push_back({r, mean_photon(rho), (sq * rho).trace(), (sp * rho).trace(), (sq0 * rho).trace(),
                    (sp0 * rho).trace(), (zl * rho).trace().real(), (xl * rho).trace().real()});
  };
  record(0);
  for (int r = 1; r <= rounds; ++r) {
    rho = apply_kraus(apply_kraus(rho, kx), kz);
    rho = 0.5 * (rho + rho.adjoint());
    double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-6) throw Error(ErrorCode::NumericalInstability, "sBs channel lost trace");
    rho /= tr;
    record(r);
  }
  return traj;
}

CMat modular_quadrature(const CMat& x, double m) {
  return spectral(x, [m](double v) { return centered_mod(v, m); });
}

std::vector<CMat> dissipator_set(const DissipatorSpec& spec, int dim) {
  check_dim(dim);
  if (!(spec.rate >= 0.0)) throw Error(ErrorCode::InvalidParameter, "dissipation rate must be >= 0");
  const double sr = std::sqrt(spec.rate);
  Ops o = operators(dim);
  std::vector<CMat> out;
  switch (spec.kind) {
    case DissipatorKind::RoyerModular: {
      const double d2 = spec.param * spec.param;
      out.push_back(sr * 2.0 * kSqrtPi * (modular_quadrature(o.q, kSqrtPi) + kI * d2 * o.p));
      out.push_back(sr * 2.0 * kSqrtPi * (modular_quadrature(o.p, kSqrtPi) - kI * d2 * o.q));
      break;
    }
    case DissipatorKind::SellemApprox: {
      const double xi = spec.xi;
      const double eps = xi * std::sinh(spec.param * spec.param);
      const double amp = std::exp(-0.5 * xi * eps);
      CMat core = amp * displacement_op(cplx(0.0, xi / std::sqrt(2.0)), dim) *
                  (CMat::Identity(dim, dim) - eps * o.p);
      for (int k = 0; k < 4; ++k) {
        CVec ph(dim);
        for (int n = 0; n < dim; ++n) ph(n) = std::exp(kI * (0.5 * std::numbers::pi * k * n));
        CMat lk = ph.asDiagonal() * core * ph.conjugate().asDiagonal();
        out.push_back(sr * (lk - CMat::Identity(dim, dim)));
      }
      break;
    }
    case DissipatorKind::Loss:
      out.push_back(std::sqrt(spec.param) * sr * o.a);
      break;
    case DissipatorKind::Dephasing:
      out.push_back(std::sqrt(2.0 * spec.param) * sr * o.n);
      break;
    case DissipatorKind::Agn:
      out.push_back(std::sqrt(spec.param) * sr * o.q);
      out.push_back(std::sqrt(spec.param) * sr * o.p);
      break;
  }
  return out;
}

double max_jump_norm(const std::vector<CMat>& ls) {
  double m = 0.0;
  for (const auto& l : ls) {
    CMat ll = l.adjoint() * l;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (ll + ll.adjoint()), Eigen::EigenvaluesOnly);
    m = std::max(m, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return m;
}

Trajectory lindblad_evolve(CMat rho, const CMat& h, const std::vector<CMat>& ls,
                           const std::vector<CMat>& observables, const LindbladOptions& opt) {
  const int dim = static_cast<int>(rho.rows());
  const double jn = max_jump_norm(ls);
  double hn = 0.0;
  if (h.size() > 0) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    hn = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  double dt = opt.dt;
  long steps = opt.steps;
  if (dt <= 0.0) {
    if (opt.t_final <= 0.0) throw Error(ErrorCode::InvalidParameter, "need dt or t_final");
    double dt_max = std::min(jn > 0.0 ? 0.1 / jn : opt.t_final, hn > 0.0 ? 1.0 / hn : opt.t_final);
    steps = static_cast<long>(std::ceil(opt.t_final / dt_max));
    dt = opt.t_final / steps;
  } else if (steps <= 0) {
    steps = static_cast<long>(std::llround(opt.t_final / dt));
  }
  if (dt * jn > 0.1 * (1.0 + 1e-12) || dt * hn > 1.0 * (1.0 + 1e-12))
    throw Error(ErrorCode::StepTooLarge, "time step violates the stability precondition");

  CMat k_sum = CMat::Zero(dim, dim);
  for (const auto& l : ls) k_sum.noalias() += l.adjoint() * l;
  std::vector<CMat> ldag;
  for (const auto& l : ls) ldag.push_back(l.adjoint());
  CMat heff = -0.5 * k_sum;
  if (h.size() > 0) heff += -kI * h;  // d rho = heff rho + rho heff^dag + sum L rho L^dag
  auto rhs = [&](const CMat& r) {
    CMat out = heff * r;
    out += out.adjoint().eval();
    for (std::size_t i = 0; i < ls.size(); ++i) out.noalias() += ls[i] * r * ldag[i];
    return out;
  };

  Trajectory traj;
  auto record = [&](double t) {
    traj.t.push_back(t);
    std::vector<cplx> row;
    for (const auto& o : observables) row.push_back((o * rho).trace());
    traj.values.push_back(std::move(row));
  };
  record(0.0);
  const int every = std::max(1, opt.record_every);
  for (long s = 1; s <= steps; ++s) {
    CMat k1 = rhs(rho);
    CMat k2 = rhs(rho + 0.5 * dt * k1);
    CMat k3 = rhs(rho + 0.5 * dt * k2);
    CMat k4 = rhs(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint());
    double drift = std::abs(rho.trace().real() - 1.0);
    traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
    if (drift > 1e-6) throw Error(ErrorCode::NumericalInstability, "Lindblad integration lost trace");
    if (s % every == 0 || s == steps) record(s * dt);
  }
  traj.rho_final = std::move(rho);
  return traj;
}

Spectrum gkp_hamiltonian(double omega0, double e_q, double e_p, double eta, int d, int dim, int keep) {
  check_dim(dim);
  if (!(eta > 0.0) || d < 1) throw Error(ErrorCode::InvalidParameter, "need eta > 0 and d >= 1");
  Ops o = operators(dim);
  const double c = std::sqrt(2.0 * std::numbers::pi * d);
  CMat h = CMat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) h(n, n) = omega0 * (n + 0.5);
  if (e_p != 0.0) h -= e_p * spectral(o.p, [&](double x) { return std::cos(c * x / eta); });
  if (e_q != 0.0) h -= e_q * spectral(o.q, [&](double x) { return std::cos(eta * c * x); });
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  Spectrum sp;
  sp.H = h;
  keep = std::min(keep, dim);
  sp.energies = es.eigenvalues().head(keep);
  sp.states = es.eigenvectors().leftCols(keep);
  const int low = std::min(2 * d, dim);
  for (int k = 0; k < low; ++k)
    sp.leakage = std::max(sp.leakage, es.eigenvectors().col(k).tail(5).squaredNorm());
  if (sp.leakage > 1e-6) throw Error(ErrorCode::TruncationTooSmall, "low eigenstates reach the truncation edge");
  if (keep >= 3) {
    sp.splitting = sp.energies(1) - sp.energies(0);
    sp.gap = sp.energies(2) - sp.energies(1);
  }
  return sp;
}

TwirlNoise twirl_noise(double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParameter, "Delta must be > 0");
  double s2 = std::tanh(0.5 * delta * delta);
  return {s2, -10.0 * std::log10(2.0 * s2)};
}

}  // namespace gkp::fock
