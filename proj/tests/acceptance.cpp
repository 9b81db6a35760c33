#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gkp/fock.hpp"
#include "gkp/lattice.hpp"
#include "gkp/o2o.hpp"
#include "gkp/qubit_mc.hpp"
#include "gkp/symplectic.hpp"
#include "oracles.hpp"

using namespace gkp;

namespace {

struct Report {
  int id;
  bool ok = true;
  std::vector<std::string> lines;

  void check(bool pass, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    ok = ok && pass;
    lines.push_back(std::string(pass ? "  ok   " : "  FAIL ") + buf);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TmsFamily family(const char* name, int n_data) { return {lattice_by_name(name), n_data}; }

Estimator mmse() { return {EstimatorKind::Mmse, 3, true}; }
Estimator linear() { return {EstimatorKind::Linear, 3, true}; }

void c1(Report& r) {
  const long trials = 2000000;
  struct Case {
    const char* name;
    double target;
  };
  for (Case c : {Case{"canonical-square", 1.2513e-3}, Case{"canonical-hex", 1.1558e-3}}) {
    GainResult g = optimize_gain(family(c.name, 1), 0.1, mmse(), trials, 101);
    double rel = g.noise.rms_sq / c.target - 1.0;
    r.check(std::abs(rel) <= 0.02, "%s: rms_sq %.5e (stderr %.1e, gain %.3f) vs %.4e, deviation %+.2f%%", c.name,
            g.noise.rms_sq, g.noise.stderr_rms_sq, g.gain, c.target, 100 * rel);
  }
}

void c2(Report& r) {
  const long trials = 200000;
  BreakevenOptions bo;
  bo.tol = 0.001;
  TmsFamily fam = family("canonical-square", 1);
  double sm = breakeven(fam, mmse(), trials, 202, {}, bo);
  double sl = breakeven(fam, linear(), trials, 202, {}, bo);
  const double cap = 1.0 / std::sqrt(2.0), floor = 1.0 / std::sqrt(std::exp(1.0)) - 0.01;
  r.check(sm >= 0.60 && sm <= 0.61, "MMSE break-even %.4f in [0.60, 0.61]", sm);
  r.check(sl >= 0.553 && sl <= 0.563, "linear break-even %.4f in [0.553, 0.563]", sl);
  r.check(sm <= cap && sl <= cap, "both <= 1/sqrt(2) = %.4f", cap);
  r.check(sm >= floor, "MMSE %.4f >= 1/sqrt(e) - 0.01 = %.4f", sm, floor);
}

void c3(Report& r) {
  TmsFamily fam = family("canonical-square", 1);
  for (double s : {0.03, 0.05}) {
    GainResult g = optimize_gain(fam, s, linear(), 1000000, 303);
    double law = 4 * std::pow(s, 4) / std::numbers::pi * std::log(std::pow(std::numbers::pi, 1.5) / (2 * std::pow(s, 4)));
    double ratio = g.noise.rms_sq / law;
    r.check(std::abs(ratio - 1.0) <= 0.15, "sigma %.2f: rms_sq %.4e, law %.4e, ratio %.3f (gain %.1f)", s,
            g.noise.rms_sq, law, ratio, g.gain);
  }
}

void c4(Report& r) {
  const long trials = 200000;
  double gm_square = optimize_gain(family("canonical-square", 1), 0.1, mmse(), trials, 404).noise.gm_sq;
  struct Case {
    const char* name;
    int n;
    double target, tol;
  };
  for (Case c : {Case{"canonical-hex", 1, 3.95, 1.0}, Case{"canonical-d4", 2, 9.04, 1.5}}) {
    GainResult g = optimize_gain(family(c.name, c.n), 0.1, mmse(), trials, 404);
    double impr = 100 * (1 - std::sqrt(g.noise.gm_sq / gm_square));
    r.check(std::abs(impr - c.target) <= c.tol, "%s: GM error improvement %.2f%% vs %.2f +- %.1f pt (gm_sq %.5e, square %.5e)",
            c.name, impr, c.target, c.tol, g.noise.gm_sq, gm_square);
  }
}

void c5(Report& r) {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  double worst_gm = 1e300, worst_rms = 1e300;
  for (int k = 0; k < 50; ++k) {
    GkpLattice anc;
    int kind = static_cast<int>(u(rng) * 4);
    if (kind == 0) anc = lattice_by_name("canonical-square");
    if (kind == 1) anc = lattice_by_name("canonical-hex");
    if (kind == 2) anc = lattice_by_name("canonical-d4");
    if (kind == 3)
      anc = from_generator(squeezer(0.8 * u(rng)) * rotation(std::numbers::pi * u(rng)), kGramTol, "squeezed");
    int n_data = anc.n_modes == 1 ? 1 : 1 + static_cast<int>(u(rng) * 2);
    std::vector<double> gains;
    for (int i = 0; i < n_data; ++i) gains.push_back(1.0 + 15.0 * u(rng));
    double sigma = 0.03 + 0.6 * u(rng);
    Estimator est = u(rng) < 0.5 ? mmse() : linear();
    MonteCarloOptions mo;
    mo.sampler = u(rng) < 0.8 ? Sampler::Conditional : Sampler::Direct;
    O2OCode code = tms_code(gains, anc);
    const int dim = 2 * (n_data + anc.n_modes);
    OutputNoise out = mc_output(code, sigma * sigma * Mat::Identity(dim, dim), est, 100000, 5000 + k, mo);
    LowerBound lb = sigma_lower_bound(std::vector<double>(n_data + anc.n_modes, sigma), n_data);
    double lb2 = lb.vacuous ? 0.0 : lb.sigma_lb * lb.sigma_lb;
    double nt = no_threshold_rhs(gains, sigma);
    // Without logical errors the output equals the Gaussian conditional variance, which is the
    // no-threshold value itself; allow for its last-bit rounding only.
    bool ok = out.gm_sq >= lb2 && out.rms_sq >= nt * (1 - 1e-12);
    failures += !ok;
    worst_gm = std::min(worst_gm, lb2 > 0 ? out.gm_sq / lb2 : 1e300);
    worst_rms = std::min(worst_rms, out.rms_sq / nt);
    if (!ok)
      r.check(false, "config %d (%s, N=%d, sigma %.3f): gm_sq %.4e vs %.4e, rms_sq %.4e vs %.4e", k, anc.name.c_str(),
              n_data, sigma, out.gm_sq, lb2, out.rms_sq, nt);
  }
  r.check(failures == 0, "50 random configurations, %d violations; min gm_sq/sigma_lb^2 %.3g, min rms_sq/no-threshold %.3g",
          failures, worst_gm, worst_rms);
}

void c6(Report& r) {
  auto dist = [&](const char* name, double x, double y, double z) {
    PauliData p = pauli_data(lattice_by_name(name));
    double err = std::max({std::abs(p.dx - x), std::abs(p.dy - y), std::abs(p.dz - z)});
    r.check(err <= 1e-9, "%s: (%.12f, %.12f, %.12f), max error %.1e", name, p.dx, p.dy, p.dz, err);
  };
  dist("square", 1 / std::sqrt(2.0), 1.0, 1 / std::sqrt(2.0));
  dist("tesseract", std::pow(2.0, -0.25), std::pow(2.0, 0.25), std::pow(2.0, -0.25));
  const double h = std::pow(3.0, -0.25);
  dist("hex", h, h, h);
  GkpLattice d4 = lattice_by_name("d4");
  PauliData p = pauli_data(d4);
  double pmin = std::min({p.dx, p.dy, p.dz});
  r.check(std::abs(pmin - 1.0) <= 1e-9, "d4: minimum Pauli length %.12f", pmin);
  Mat basis = lll_reduce(d4.M);
  double smin = 1e300;
  oracle::box(basis.cols(), 3, [&](const Eigen::VectorXi& c) {
    if (c.isZero()) return;
    smin = std::min(smin, (basis * c.cast<double>()).norm());
  });
  r.check(std::abs(smin - std::sqrt(2.0)) <= 1e-9, "d4: minimum stabilizer length %.12f", smin);
}

void c7(Report& r) {
  const long trials = 1000000;
  for (const char* name : {"square", "tesseract"}) {
    GkpLattice l = lattice_by_name(name);
    for (double s : {0.15, 0.2, 0.25}) {
      ErrorRates mc = mc_logical_rates(l, s, trials, 707);
      ErrorRates cf = pauli_error_prob(l, s);
      auto z = [](double a, double b, double se) { return se > 0 ? std::abs(a - b) / se : (a == b ? 0.0 : 1e300); };
      // The closed form is exact-valued, so the combined error is the MC standard error alone.
      double zx = z(mc.p_x, cf.p_x, mc.se_x), zy = z(mc.p_y, cf.p_y, mc.se_y), zz = z(mc.p_z, cf.p_z, mc.se_z);
      r.check(zx <= 3 && zy <= 3 && zz <= 3,
              "%s sigma %.2f: MC (%.3e, %.3e, %.3e) closed form (%.3e, %.3e, %.3e) z = (%.1f, %.1f, %.1f)", name, s,
              mc.p_x, mc.p_y, mc.p_z, cf.p_x, cf.p_y, cf.p_z, zx, zy, zz);
    }
  }
}

void c8(Report& r) {
  Mat square = lattice_by_name("square").M * rotation(std::numbers::pi / 4);
  MatI rep(1, 4);
  rep << 1, 1, 1, 1;  // YY
  GkpLattice d4 = concatenate(square, rep);
  r.check(same_lattice(d4.M, lattice_by_name("d4").M),
          "square (rotated by pi/4) (x) [[2,1]] YY-repetition equals the d4 qubit lattice (d = %d)", d4.d);
  Mat rect = lattice_by_name("rectangular", std::pow(2.0, -0.25)).M;
  MatI zz(1, 4);
  zz << 0, 1, 0, 1;
  GkpLattice tess = concatenate(rect, zz);
  r.check(same_lattice(tess.M, lattice_by_name("tesseract").M),
          "rectangular (x) [[2,1]] ZZ-repetition equals the tesseract lattice (d = %d)", tess.d);
}

void c9(Report& r) {
  using namespace gkp::fock;
  auto t0 = std::chrono::steady_clock::now();
  const int dim = 120;
  const double delta = 0.3;
  SbsRound rx = sbs_round(Axis::X, delta, dim), rz = sbs_round(Axis::Z, delta, dim);
  double comp = 0.0;
  for (const SbsRound* s : {&rx, &rz}) {
    CMat sum = s->K_g.adjoint() * s->K_g + s->K_e.adjoint() * s->K_e;
    comp = std::max(comp, (sum - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff());
  }
  r.check(comp <= 1e-9, "(a) Kraus completeness error %.1e", comp);

  GkpFockParams p;
  p.delta = delta;
  p.dim = dim;
  CVec zero = gkp_state(p).psi;
  p.logical = Logical::One;
  CVec one = gkp_state(p).psi;
  CMat rho = apply_kraus(apply_kraus(projector(zero), {rx.K_g, rx.K_e}), {rz.K_g, rz.K_e});
  double fid = one.dot(rho * one).real();
  r.check(fid >= 0.99, "(b) one XZ cycle maps |0_D> to |1_D> (Pauli frame) with fidelity %.4f", fid);

  CMat vac = CMat::Zero(dim, dim);
  vac(0, 0) = 1.0;
  auto traj = evolve_sbs(vac, delta, 30);
  int first = -1;
  for (const auto& pt : traj)
    if (first < 0 && pt.s_q.real() >= 0.9) first = pt.round;
  r.check(first >= 0, "(c) from vacuum Re<S_x(D)> >= 0.9 first at round %d; round 30: %.4f (ideal-operator %.4f)", first,
          traj.back().s_q.real(), traj.back().s_q_ideal.real());

  {
    const int ld = 40;
    Ops o = operators(ld);
    CMat rho3 = CMat::Zero(ld, ld);
    rho3(3, 3) = 1.0;
    LindbladOptions lo;
    lo.t_final = 1.0;
    auto tj = lindblad_evolve(rho3, CMat(), dissipator_set({DissipatorKind::Loss, 1.0}, ld), {o.n}, lo);
    double n1 = tj.values.back()[0].real(), want = 3 * std::exp(-1.0);
    r.check(std::abs(n1 / want - 1) <= 0.01, "(d) loss: <n>(kappa t = 1) = %.6f vs 3 e^-1 = %.6f", n1, want);
  }

  {
    const double d = 0.2;
    auto ls = dissipator_set({DissipatorKind::RoyerModular, d}, dim);
    LindbladOptions lo;
    lo.t_final = 10.0;
    lo.record_every = 1;
    CMat sx = finite_energy_displacement(stabilizer_q_alpha(), d, dim);
    auto tj = lindblad_evolve(vac, CMat(), ls, {sx}, lo);
    std::size_t imin = 0;
    for (std::size_t i = 0; i < tj.t.size(); ++i)
      if (tj.values[i][0].real() < tj.values[imin][0].real()) imin = i;
    double worst_drop = 0.0;
    for (std::size_t i = imin + 1; i < tj.t.size(); ++i)
      worst_drop = std::max(worst_drop, tj.values[i - 1][0].real() - tj.values[i][0].real());
    double fin = tj.values.back()[0].real();
    r.check(fin >= 0.95 && worst_drop <= 1e-9,
            "(e) Royer dissipators: Re<S_x(D)> %.4f at t=0, minimum %.4f at t=%.2f, %.4f at Gamma t = 10; largest decrease after "
            "the minimum %.1e",
            tj.values.front()[0].real(), tj.values[imin][0].real(), tj.t[imin], fin, worst_drop);
  }
  double el = seconds_since(t0);
  r.check(el <= 600, "runtime %.1f s at D = %d", el, dim);
}

void c10(Report& r) {
  using namespace gkp::fock;
  const int dim = 260;
  const double e = 50.0;
  Spectrum sp = gkp_hamiltonian(1.0, e, e, 1.0, 2, dim, 4);
  r.check(sp.splitting < 0.05 * sp.gap, "splitting %.3e, gap %.3f, ratio %.2e (leakage %.1e)", sp.splitting, sp.gap,
          sp.splitting / sp.gap, sp.leakage);
  CMat g = sp.states.leftCols(2);
  CMat fourier = CMat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) fourier(n, n) = std::polar(1.0, 0.5 * std::numbers::pi * n);
  Eigen::ComplexEigenSolver<CMat> es(g.adjoint() * fourier * g);
  CMat gf = g * es.eigenvectors();
  // Envelope width from the impedance of the quadratic expansion around a minimum.
  const double delta = 1.0 / std::sqrt(std::sqrt(4 * std::numbers::pi) * std::sqrt(e));
  GkpFockParams p;
  p.delta = delta;
  p.dim = dim;
  CVec z = gkp_state(p).psi;
  p.logical = Logical::One;
  CVec o = gkp_state(p).psi;
  const double c = std::cos(std::numbers::pi / 8), s = std::sin(std::numbers::pi / 8);
  CVec hp = (c * z + s * o).normalized(), hm = (-s * z + c * o).normalized();
  for (auto [name, h] : {std::pair{"H+", hp}, std::pair{"H-", hm}}) {
    double best = 0.0;
    for (int k = 0; k < 2; ++k) best = std::max(best, std::norm(h.dot(gf.col(k).normalized())));
    r.check(best > 0.9, "|<psi_%s|ground>|^2 = %.4f (Delta = %.4f)", name, best, delta);
  }
}

bool same_bits(const Mat& a, const Mat& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

void c11(Report& r) {
  for (const char* name : {"hex", "tesseract", "d4"}) {
    GkpLattice l = lattice_by_name(name);
    McOptions o1, o4;
    o4.threads = 4;
    ErrorRates a = mc_logical_rates(l, 0.3, 500000, 1111, o1), b = mc_logical_rates(l, 0.3, 500000, 1111, o4);
    r.check(a.n_x == b.n_x && a.n_y == b.n_y && a.n_z == b.n_z &&
                std::memcmp(&a.p_e, &b.p_e, sizeof(double)) == 0,
            "qubit MC %s: tallies (%ld, %ld, %ld) with 1 and 4 threads", name, a.n_x, a.n_y, a.n_z);
  }
  for (Sampler smp : {Sampler::Conditional, Sampler::Direct}) {
    for (auto [name, n] : {std::pair{"canonical-hex", 1}, std::pair{"canonical-d4", 2}}) {
      O2OCode code = tms_code(std::vector<double>(n, 4.0), lattice_by_name(name));
      const int dim = 2 * (n + code.ancilla.n_modes);
      MonteCarloOptions m1, m3;
      m1.sampler = m3.sampler = smp;
      m3.threads = 3;
      Mat y = 0.04 * Mat::Identity(dim, dim);
      OutputNoise a = mc_output(code, y, mmse(), 50000, 1212, m1), b = mc_output(code, y, mmse(), 50000, 1212, m3);
      r.check(same_bits(a.V_out, b.V_out), "O2O %s %s sampler: V_out bit-identical with 1 and 3 threads",
              name, smp == Sampler::Direct ? "direct" : "conditional");
    }
  }
  MonteCarloOptions m1, m4;
  m4.threads = 4;
  TmsFamily fam = family("canonical-square", 1);
  GainResult a = optimize_gain(fam, 0.2, mmse(), 20000, 1313, m1), b = optimize_gain(fam, 0.2, mmse(), 20000, 1313, m4);
  r.check(std::memcmp(&a.gain, &b.gain, sizeof(double)) == 0 && same_bits(a.noise.V_out, b.noise.V_out),
          "gain optimization: gain %.10g identical with 1 and 4 threads", a.gain);
  BreakevenOptions bo;
  bo.tol = 0.01;
  double s1 = breakeven(fam, linear(), 10000, 1414, m1, bo), s4 = breakeven(fam, linear(), 10000, 1414, m4, bo);
  r.check(std::memcmp(&s1, &s4, sizeof(double)) == 0, "break-even: %.10g identical with 1 and 4 threads", s1);
}

const std::vector<std::pair<const char*, std::function<void(Report&)>>> kCriteria = {
    {"single-mode TMS output noise at sigma^2 = 1e-2", c1},
    {"break-even noise levels", c2},
    {"linear-estimator small-noise law", c3},
    {"multimode ancilla ordering at sigma = 0.1", c4},
    {"bound dominance over random configurations", c5},
    {"Pauli distances", c6},
    {"closest-point decoder versus closed form", c7},
    {"concatenation identities", c8},
    {"Fock-space stabilization suite", c9},
    {"GKP Hamiltonian ground doublet", c10},
    {"thread-count determinism", c11},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= static_cast<int>(kCriteria.size()); ++i) ids.push_back(i);
  bool all = true;
  for (int id : ids) {
    if (id < 1 || id > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    Report rep{id};
    auto t0 = std::chrono::steady_clock::now();
    try {
      kCriteria[id - 1].second(rep);
    } catch (const std::exception& e) {
      rep.check(false, "exception: %s", e.what());
    }
    for (const auto& l : rep.lines) std::printf("%s\n", l.c_str());
    std::printf("criterion %d: %s (%s) [%.1f s]\n", id, rep.ok ? "PASS" : "FAIL", kCriteria[id - 1].first,
                seconds_since(t0));
    std::fflush(stdout);
    all = all && rep.ok;
  }
  return all ? 0 : 1;
}
