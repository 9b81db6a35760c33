#include "experiments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "gkp/channels.hpp"
#include "gkp/fock.hpp"
#include "gkp/o2o.hpp"
#include "gkp/qubit_mc.hpp"
#include "gkp/symplectic.hpp"

namespace gkplab {

using gkp::Mat;
using gkp::Vec;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

std::string fmt_int(long v) { return std::to_string(v); }

double real(const RunContext& c, const char* k) { return c.params.at(k).get<double>(); }
long integer(const RunContext& c, const char* k) { return c.params.at(k).get<long>(); }
std::string text(const RunContext& c, const char* k) { return c.params.at(k).get<std::string>(); }
bool flag(const RunContext& c, const char* k) { return c.params.at(k).get<bool>(); }

template <class T>
T choose(const std::string& key, const std::string& value,
         const std::vector<std::pair<std::string, T>>& options) {
  for (const auto& [name, v] : options)
    if (name == value) return v;
  std::string all;
  for (const auto& o : options) all += (all.empty() ? "" : ", ") + o.first;
  throw ConfigError("parameter '" + key + "' must be one of: " + all);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::string gram_text(const gkp::MatI& a) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < a.rows(); ++i) {
    os << (i ? ",[" : "[");
    for (int j = 0; j < a.cols(); ++j) os << (j ? "," : "") << a(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

gkp::GkpLattice qubit_lattice(const RunContext& c, const char* key) {
  std::string name = text(c, key);
  double param = real(c, "param");
  if (name == "rectangular" && param == 0.0) param = 1.0;
  try {
    return gkp::lattice_by_name(name, param);
  } catch (const gkp::Error& e) {
    if (e.code() == gkp::ErrorCode::InvalidParameter) throw ConfigError(e.what());
    throw;
  }
}

// Canonical single-mode lattice Sq(r) R(theta) Z^2.
gkp::GkpLattice squeezed_canonical(double r, double theta) {
  return gkp::from_generator(gkp::squeezer(r) * gkp::rotation(theta), gkp::kGramTol, "squeezed");
}

gkp::GkpLattice ancilla_lattice(const std::string& name, double r, double theta) {
  if (name == "square") return gkp::standard_lattice(gkp::LatticeKind::CanonicalSquare, 1);
  if (name == "hex") return gkp::standard_lattice(gkp::LatticeKind::CanonicalHex);
  if (name == "d4") return gkp::standard_lattice(gkp::LatticeKind::CanonicalD4);
  if (name == "e8") return gkp::standard_lattice(gkp::LatticeKind::E8);
  if (name == "squeezed") return squeezed_canonical(r, theta);
  throw ConfigError("parameter 'ancilla' must be one of: square, hex, d4, e8, squeezed");
}

gkp::Estimator estimator_of(const RunContext& c) {
  gkp::Estimator e;
  e.kind = choose<gkp::EstimatorKind>("estimator", text(c, "estimator"),
                                      {{"mmse", gkp::EstimatorKind::Mmse}, {"linear", gkp::EstimatorKind::Linear}});
  e.n_max = static_cast<int>(integer(c, "n_max"));
  require(e.n_max >= 1, "parameter 'n_max' must be >= 1");
  return e;
}

gkp::MonteCarloOptions mc_options(const RunContext& c) {
  gkp::MonteCarloOptions o;
  o.sampler = choose<gkp::Sampler>("sampler", text(c, "sampler"),
                                   {{"conditional", gkp::Sampler::Conditional}, {"direct", gkp::Sampler::Direct}});
  o.threads = c.threads;
  return o;
}

long trials_of(const RunContext& c, long minimum) {
  long t = integer(c, "trials");
  require(t >= minimum, "parameter 'trials' must be >= " + std::to_string(minimum));
  return t;
}

const std::vector<ParamSpec> kO2OCommon = {
    {"ancilla", ParamType::Text, "square", "ancilla lattice: square, hex, d4, e8, squeezed"},
    {"r", ParamType::Real, 0.0, "squeezing of the 'squeezed' ancilla Sq(r)R(theta)"},
    {"theta", ParamType::Real, 0.0, "rotation of the 'squeezed' ancilla"},
    {"n_data", ParamType::Integer, 0, "data modes (0: as many as ancilla modes)"},
    {"estimator", ParamType::Text, "mmse", "mmse or linear"},
    {"n_max", ParamType::Integer, 3, "initial MMSE truncation (raised automatically)"},
    {"sampler", ParamType::Text, "conditional", "conditional or direct"},
    {"trials", ParamType::Count, 200000, "Monte Carlo trials per evaluation"},
};

std::vector<ParamSpec> with(std::vector<ParamSpec> base, const std::vector<ParamSpec>& extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

gkp::TmsFamily family_of(const RunContext& c) {
  gkp::TmsFamily f;
  f.ancilla = ancilla_lattice(text(c, "ancilla"), real(c, "r"), real(c, "theta"));
  long n = integer(c, "n_data");
  f.n_data = n > 0 ? static_cast<int>(n) : f.ancilla.n_modes;
  require(f.n_data <= f.ancilla.n_modes, "parameter 'n_data' exceeds the ancilla mode count");
  return f;
}

const char* kO2OUnits =
    "sigma: per-quadrature noise std (vacuum units); gain: TMS power gain; rms_sq, gm_sq, stderr: "
    "output variance; sigma_lb: std lower bound";
const std::vector<std::string> kO2OColumns = {"ancilla", "estimator", "sigma", "gain", "rms_sq",
                                              "gm_sq",   "stderr",    "sigma_lb"};

struct O2OPoint {
  double gain;
  gkp::OutputNoise noise;
  bool boundary = false;
};

double lower_bound_std(const gkp::TmsFamily& fam, double sigma) {
  gkp::LowerBound lb = gkp::sigma_lower_bound(
      std::vector<double>(fam.n_data + fam.ancilla.n_modes, sigma), fam.n_data);
  return lb.vacuous ? std::nan("") : lb.sigma_lb;
}

std::vector<std::string> o2o_row(const RunContext& c, double sigma, const O2OPoint& p,
                                 const gkp::TmsFamily& fam) {
  return {text(c, "ancilla"), text(c, "estimator"), fmt(sigma), fmt(p.gain), fmt(p.noise.rms_sq),
          fmt(p.noise.gm_sq), fmt(p.noise.stderr_rms_sq), fmt(lower_bound_std(fam, sigma))};
}

std::vector<Table> run_lattice_info(const RunContext& c) {
  gkp::GkpLattice l = qubit_lattice(c, "name");
  Table t;
  t.name = "lattice";
  t.units = "distances in units of sqrt(2 pi)";
  t.columns = {"lattice", "n_modes", "d", "dist_x", "dist_y", "dist_z", "gram"};
  t.plot = PlotKind::None;
  std::string dx, dy, dz;
  if (l.d == 2) {
    gkp::PauliData p = gkp::pauli_data(l);
    dx = fmt(p.dx);
    dy = fmt(p.dy);
    dz = fmt(p.dz);
  }
  t.rows.push_back({text(c, "name"), fmt_int(l.n_modes), fmt_int(l.d), dx, dy, dz, gram_text(l.A)});
  return {t};
}

std::vector<Table> run_qubit_mc(const RunContext& c) {
  gkp::GkpLattice l = qubit_lattice(c, "lattice");
  double sigma = real(c, "sigma");
  require(sigma > 0.0, "parameter 'sigma' must be > 0");
  long trials = trials_of(c, 1);
  gkp::McOptions o;
  o.threads = c.threads;
  o.coeff_bound = static_cast<int>(integer(c, "coeff_bound"));
  Table t;
  t.name = "qubit_mc";
  t.units = "sigma: per-quadrature noise std; p_*: logical error probabilities; se_*: Wilson standard errors; trials = 0 marks the closed form";
  t.columns = {"lattice", "sigma", "trials", "p_x", "p_y", "p_z", "p_e", "se_x", "se_y", "se_z"};
  t.plot = PlotKind::None;
  auto row = [&](const gkp::ErrorRates& r) {
    t.rows.push_back({text(c, "lattice"), fmt(sigma), fmt_int(r.trials), fmt(r.p_x), fmt(r.p_y), fmt(r.p_z),
                      fmt(r.p_e), fmt(r.se_x), fmt(r.se_y), fmt(r.se_z)});
  };
  row(gkp::mc_logical_rates(l, sigma, trials, c.seed, o));
  if (flag(c, "closed_form")) row(gkp::pauli_error_prob(l, sigma));
  return {t};
}

std::vector<Table> run_o2o(const RunContext& c) {
  gkp::TmsFamily fam = family_of(c);
  double sigma = real(c, "sigma");
  require(sigma > 0.0, "parameter 'sigma' must be > 0");
  double gain = flag(c, "optimize_gain") ? 0.0 : real(c, "gain");
  O2OPoint p = [&] {
    gkp::Estimator est = estimator_of(c);
    long trials = trials_of(c, 1000);
    if (gain > 0.0) {
      require(gain >= 1.0, "parameter 'gain' must be >= 1");
      gkp::O2OCode code = gkp::tms_code(std::vector<double>(fam.n_data, gain), fam.ancilla);
      const int dim = 2 * (fam.n_data + fam.ancilla.n_modes);
      return O2OPoint{gain, gkp::mc_output(code, sigma * sigma * Mat::Identity(dim, dim), est, trials, c.seed, mc_options(c))};
    }
    gkp::GainResult r = gkp::optimize_gain(fam, sigma, est, trials, c.seed, mc_options(c));
    return O2OPoint{r.gain, r.noise, r.at_boundary};
  }();
  Table t;
  t.name = "o2o";
  t.units = kO2OUnits;
  t.columns = kO2OColumns;
  t.plot = PlotKind::None;
  t.rows.push_back(o2o_row(c, sigma, p, fam));
  if (p.boundary) t.notes.push_back("optimal gain at the search boundary");
  return {t};
}

std::vector<double> grid(double lo, double hi, long n, bool log_scale) {
  std::vector<double> out;
  for (long i = 0; i < n; ++i) {
    double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(log_scale ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  return out;
}

std::vector<Table> run_o2o_sweep(const RunContext& c) {
  gkp::TmsFamily fam = family_of(c);
  double lo = real(c, "sigma_min"), hi = real(c, "sigma_max");
  long n = integer(c, "points");
  require(lo > 0.0 && hi >= lo && n >= 1, "need 0 < sigma_min <= sigma_max and points >= 1");
  gkp::Estimator est = estimator_of(c);
  long trials = trials_of(c, 1000);
  Table t;
  t.name = "o2o_sweep";
  t.units = std::string(kO2OUnits) + "; qec_gain_db: 10 log10(sigma^2 / rms_sq)";
  t.columns = kO2OColumns;
  t.columns.push_back("qec_gain_db");
  for (double sigma : grid(lo, hi, n, flag(c, "log"))) {
    gkp::GainResult r = gkp::optimize_gain(fam, sigma, est, trials, c.seed, mc_options(c));
    auto row = o2o_row(c, sigma, {r.gain, r.noise, r.at_boundary}, fam);
    row.push_back(fmt(10.0 * std::log10(sigma * sigma / r.noise.rms_sq)));
    t.rows.push_back(row);
  }
  return {t};
}

std::vector<Table> run_breakeven(const RunContext& c) {
  gkp::TmsFamily fam = family_of(c);
  gkp::BreakevenOptions bo;
  bo.tol = real(c, "tol");
  bo.lo = real(c, "lo");
  bo.hi = real(c, "hi");
  require(bo.tol > 0.0 && bo.lo > 0.0 && bo.hi > bo.lo, "need tol > 0 and 0 < lo < hi");
  double s = gkp::breakeven(fam, estimator_of(c), trials_of(c, 1000), c.seed, mc_options(c), bo);
  Table t;
  t.name = "breakeven";
  t.units = "sigma_star: per-quadrature noise std at which QEC gain vanishes; window: information-theoretic interval";
  t.columns = {"ancilla", "estimator", "sigma_star", "window_lo", "window_hi"};
  t.plot = PlotKind::None;
  t.rows.push_back({text(c, "ancilla"), text(c, "estimator"), fmt(s), fmt(1.0 / std::sqrt(std::exp(1.0))),
                    fmt(1.0 / std::sqrt(2.0))});
  return {t};
}

std::vector<Table> run_capacity(const RunContext& c) {
  std::string kind = text(c, "channel");
  gkp::NoiseSpec spec;
  if (kind == "loss") {
    spec = gkp::LossNoise{real(c, "eta"), real(c, "nbar")};
  } else if (kind == "agn") {
    long n = integer(c, "n_modes");
    require(n >= 1, "parameter 'n_modes' must be >= 1");
    spec = gkp::AgnNoise{real(c, "sigma2") * Mat::Identity(2 * n, 2 * n)};
  } else if (kind == "amp") {
    spec = gkp::AmpNoise{real(c, "gain"), real(c, "nbar")};
  } else {
    throw ConfigError("parameter 'channel' must be one of: loss, agn, amp");
  }
  gkp::CapacityBounds b = gkp::capacity_bounds(spec);
  Table t;
  t.name = "capacity";
  t.units = "lower, upper: quantum capacity bounds in qubits per channel use";
  t.columns = {"channel", "eta", "nbar", "sigma2", "n_modes", "lower", "upper", "lower_vacuous"};
  t.plot = PlotKind::None;
  t.rows.push_back({kind, fmt(real(c, "eta")), fmt(real(c, "nbar")), fmt(real(c, "sigma2")),
                    fmt_int(integer(c, "n_modes")), fmt(b.lower), fmt(b.upper), b.lower_vacuous ? "1" : "0"});
  return {t};
}

gkp::CMat start_state(const std::string& start, double delta, int dim) {
  if (start == "vacuum") {
    gkp::CMat r = gkp::CMat::Zero(dim, dim);
    r(0, 0) = 1.0;
    return r;
  }
  gkp::fock::GkpFockParams p;
  p.delta = delta;
  p.dim = dim;
  p.logical = choose<gkp::fock::Logical>("start", start, {{"zero", gkp::fock::Logical::Zero},
                                                          {"one", gkp::fock::Logical::One}});
  return gkp::fock::projector(gkp::fock::gkp_state(p).psi);
}

int dim_of(const RunContext& c) {
  long d = integer(c, "dim");
  require(d >= 10 && d <= 2000, "parameter 'dim' must lie in [10, 2000]");
  return static_cast<int>(d);
}

double delta_of(const RunContext& c) {
  double d = real(c, "delta");
  require(d > 0.0, "parameter 'delta' must be > 0");
  return d;
}

const char* kFockUnits =
    "t: dimensionless rate x time; re_Sx, re_Sp: finite-energy stabilizers exp(i 2 sqrt(pi) q), "
    "exp(-i 2 sqrt(pi) p) conjugated by exp(-Delta^2 n); Z, X: sgn cos Paulis";

std::vector<Table> run_fock_sbs(const RunContext& c) {
  const double delta = delta_of(c);
  const int dim = dim_of(c);
  long rounds = integer(c, "rounds");
  require(rounds >= 0, "parameter 'rounds' must be >= 0");
  if (text(c, "start") != "vacuum") choose<int>("start", text(c, "start"), {{"zero", 0}, {"one", 1}});
  auto traj = gkp::fock::evolve_sbs(start_state(text(c, "start"), delta, dim), delta, static_cast<int>(rounds));
  Table t;
  t.name = "sbs";
  t.units = std::string(kFockUnits) + "; step: sBs XZ cycle; *_ideal: infinite-energy stabilizers";
  t.columns = {"step", "n_mean", "re_Sx", "re_Sp", "Z", "X", "re_Sx_ideal", "re_Sp_ideal"};
  for (const auto& p : traj)
    t.rows.push_back({fmt_int(p.round), fmt(p.n_mean), fmt(p.s_q.real()), fmt(p.s_p.real()), fmt(p.z), fmt(p.x),
                      fmt(p.s_q_ideal.real()), fmt(p.s_p_ideal.real())});
  return {t};
}

struct LindbladRun {
  gkp::fock::Trajectory traj;
  gkp::CMat rho_final;
  long steps = 0;
  double dt = 0.0;
};

LindbladRun lindblad(const std::string& kinds, double delta, double kappa, double rate, double t_final,
                     int dim, long records, const gkp::CMat& rho0) {
  using gkp::fock::DissipatorKind;
  std::vector<gkp::CMat> ls;
  std::stringstream ss(kinds);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto kind = choose<DissipatorKind>("dissipators", item,
                                       {{"royer", DissipatorKind::RoyerModular},
                                        {"sellem", DissipatorKind::SellemApprox},
                                        {"loss", DissipatorKind::Loss},
                                        {"dephasing", DissipatorKind::Dephasing},
                                        {"agn", DissipatorKind::Agn}});
    gkp::fock::DissipatorSpec spec{kind};
    const bool gkp_kind = kind == DissipatorKind::RoyerModular || kind == DissipatorKind::SellemApprox;
    spec.param = gkp_kind ? delta : kappa;
    spec.rate = gkp_kind ? rate : 1.0;
    auto part = gkp::fock::dissipator_set(spec, dim);
    ls.insert(ls.end(), part.begin(), part.end());
  }
  require(!ls.empty(), "parameter 'dissipators' is empty");
  require(t_final > 0.0, "parameter 'gamma_t' must be > 0");
  require(records >= 1, "parameter 'records' must be >= 1");
  const double jn = gkp::fock::max_jump_norm(ls);
  LindbladRun run;
  run.steps = std::max<long>(1, static_cast<long>(std::ceil(t_final * jn / 0.1)));
  run.dt = t_final / static_cast<double>(run.steps);
  gkp::fock::Ops o = gkp::fock::operators(dim);
  std::vector<gkp::CMat> obs = {o.n,
                                gkp::fock::finite_energy_displacement(gkp::fock::stabilizer_q_alpha(), delta, dim),
                                gkp::fock::finite_energy_displacement(gkp::fock::stabilizer_p_alpha(), delta, dim),
                                gkp::fock::generalized_pauli(gkp::fock::Axis::Z, dim),
                                gkp::fock::generalized_pauli(gkp::fock::Axis::X, dim),
                                gkp::CMat::Identity(dim, dim)};
  gkp::fock::LindbladOptions lo;
  lo.dt = run.dt;
  lo.steps = run.steps;
  lo.record_every = static_cast<int>(std::max<long>(1, run.steps / records));
  run.traj = gkp::fock::lindblad_evolve(rho0, gkp::CMat(), ls, obs, lo);
  return run;
}

Table lindblad_table(const LindbladRun& run) {
  Table t;
  t.name = "lindblad";
  t.units = kFockUnits;
  t.columns = {"step", "t", "n_mean", "re_Sx", "re_Sp", "Z", "X"};
  for (std::size_t i = 0; i < run.traj.t.size(); ++i) {
    const auto& v = run.traj.values[i];
    long step = std::lround(run.traj.t[i] / run.dt);
    t.rows.push_back({fmt_int(step), fmt(run.traj.t[i]), fmt(v[0].real()), fmt(v[1].real()), fmt(v[2].real()),
                      fmt(v[3].real()), fmt(v[4].real())});
  }
  t.notes.push_back("max trace drift " + fmt(run.traj.max_trace_drift));
  return t;
}

std::vector<Table> run_fock_lindblad(const RunContext& c) {
  const double delta = delta_of(c);
  const int dim = dim_of(c);
  std::string start = text(c, "start");
  if (start != "vacuum") choose<int>("start", start, {{"zero", 0}, {"one", 1}});
  LindbladRun run = lindblad(text(c, "dissipators"), delta, real(c, "kappa"), real(c, "rate"), real(c, "gamma_t"),
                             dim, integer(c, "records"), start_state(start, delta, dim));
  return {lindblad_table(run)};
}

std::vector<Table> run_fock_spectrum(const RunContext& c) {
  long d = integer(c, "d");
  require(d >= 1, "parameter 'd' must be >= 1");
  long keep = integer(c, "keep");
  require(keep >= 1, "parameter 'keep' must be >= 1");
  const int dim = dim_of(c);
  gkp::fock::Spectrum sp = gkp::fock::gkp_hamiltonian(real(c, "omega0"), real(c, "e_q"), real(c, "e_p"), real(c, "eta"),
                                                      static_cast<int>(d), dim, static_cast<int>(keep));
  gkp::fock::Ops o = gkp::fock::operators(dim);
  Table t;
  t.name = "spectrum";
  t.units = "energy in units of omega0 (same units as the inputs); n_mean: photon number of the eigenstate";
  t.columns = {"level", "energy", "n_mean"};
  t.plot = PlotKind::None;
  for (int k = 0; k < sp.energies.size(); ++k) {
    gkp::CVec v = sp.states.col(k);
    t.rows.push_back({fmt_int(k), fmt(sp.energies(k)), fmt(v.dot(o.n * v).real())});
  }
  t.notes.push_back("splitting " + fmt(sp.splitting) + " gap " + fmt(sp.gap) + " leakage " + fmt(sp.leakage));
  return {t};
}

Table wigner_table(const gkp::Mat& w, const std::vector<double>& qs, const std::vector<double>& ps) {
  Table t;
  t.name = "wigner";
  t.units = "q, p: quadratures (vacuum variance 1/2); W: Wigner quasi-probability density";
  t.columns = {"q", "p", "W"};
  t.plot = PlotKind::Map;
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = 0; j < ps.size(); ++j) t.rows.push_back({fmt(qs[i]), fmt(ps[j]), fmt(w(i, j))});
  return t;
}

std::vector<Table> run_wigner(const RunContext& c) {
  const int dim = dim_of(c);
  const double delta = delta_of(c);
  long pts = integer(c, "points");
  require(pts >= 2, "parameter 'points' must be >= 2");
  double qm = real(c, "q_max"), pm = real(c, "p_max");
  require(qm > 0 && pm > 0, "grid half-widths must be > 0");
  std::string state = text(c, "state");
  gkp::CVec psi;
  if (state == "fock") {
    long n = integer(c, "n");
    require(n >= 0 && n < dim, "parameter 'n' must lie in [0, dim)");
    psi = gkp::CVec::Zero(dim);
    psi(n) = 1.0;
  } else {
    gkp::fock::GkpFockParams p;
    p.delta = delta;
    p.dim = dim;
    auto make = [&](gkp::fock::Logical l) {
      p.logical = l;
      return gkp::fock::gkp_state(p).psi;
    };
    int which = choose<int>("state", state, {{"zero", 0}, {"one", 1}, {"plus", 2}, {"minus", 3}, {"canonical", 4}});
    if (which == 0) psi = make(gkp::fock::Logical::Zero);
    else if (which == 1) psi = make(gkp::fock::Logical::One);
    else if (which == 4) psi = make(gkp::fock::Logical::Canonical);
    else {
      psi = make(gkp::fock::Logical::Zero) + (which == 2 ? 1.0 : -1.0) * make(gkp::fock::Logical::One);
      psi /= psi.norm();
    }
  }
  auto qs = grid(-qm, qm, pts, false), ps = grid(-pm, pm, pts, false);
  return {wigner_table(gkp::fock::wigner(psi, qs, ps), qs, ps)};
}

// Canned figure recipes.

std::vector<Table> fig24(const RunContext& c) {
  long trials = trials_of(c, 1000);
  long nr = integer(c, "r_points"), nt = integer(c, "theta_points");
  double rmax = real(c, "r_max");
  require(nr >= 1 && nt >= 1 && rmax >= 0.0, "need r_points, theta_points >= 1 and r_max >= 0");
  const double sigma = std::sqrt(real(c, "sigma2"));
  gkp::Estimator est;
  gkp::MonteCarloOptions mo;
  mo.threads = c.threads;
  Table map;
  map.name = "map";
  map.units = "r, theta: ancilla lattice Sq(r) R(theta) Z^2; rms_sq, gm_sq: output variance at optimized gain";
  map.columns = {"r", "theta", "gain", "rms_sq", "gm_sq"};
  map.plot = PlotKind::Map;
  for (double r : grid(0.0, rmax, nr, false)) {
    for (long j = 0; j < nt; ++j) {
      double th = 0.5 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nt);
      gkp::TmsFamily fam{squeezed_canonical(r, th), 1};
      gkp::GainResult g = gkp::optimize_gain(fam, sigma, est, trials, c.seed, mo);
      map.rows.push_back({fmt(r), fmt(th), fmt(g.gain), fmt(g.noise.rms_sq), fmt(g.noise.gm_sq)});
    }
  }
  Table ref;
  ref.name = "lattices";
  ref.units = kO2OUnits;
  ref.columns = kO2OColumns;
  ref.plot = PlotKind::None;
  for (const char* name : {"square", "hex"}) {
    gkp::TmsFamily fam{ancilla_lattice(name, 0, 0), 1};
    gkp::GainResult g = gkp::optimize_gain(fam, sigma, est, trials, c.seed, mo);
    ref.rows.push_back({name, "mmse", fmt(sigma), fmt(g.gain), fmt(g.noise.rms_sq), fmt(g.noise.gm_sq),
                        fmt(g.noise.stderr_rms_sq), fmt(lower_bound_std(fam, sigma))});
  }
  return {map, ref};
}

std::vector<Table> fig25(const RunContext& c) {
  long trials = trials_of(c, 1000);
  long n = integer(c, "points");
  require(n >= 1, "parameter 'points' must be >= 1");
  gkp::MonteCarloOptions mo;
  mo.threads = c.threads;
  const std::vector<std::pair<std::string, gkp::TmsFamily>> fams = {
      {"square", {ancilla_lattice("square", 0, 0), 1}},
      {"hex", {ancilla_lattice("hex", 0, 0), 1}},
      {"d4", {ancilla_lattice("d4", 0, 0), 2}}};
  Table t;
  t.name = "qec_gain";
  t.units = "sigma: input noise std; columns: QEC gain 10 log10(sigma^2 / rms_sq) in dB; bound: information-theoretic maximum";
  t.columns = {"sigma"};
  for (const auto& f : fams)
    for (const char* e : {"linear", "mmse"}) t.columns.push_back(f.first + "_" + e);
  t.columns.push_back("bound");
  for (double sigma : grid(real(c, "sigma_min"), real(c, "sigma_max"), n, false)) {
    std::vector<std::string> row = {fmt(sigma)};
    for (const auto& f : fams)
      for (auto kind : {gkp::EstimatorKind::Linear, gkp::EstimatorKind::Mmse}) {
        gkp::GainResult g = gkp::optimize_gain(f.second, sigma, {kind}, trials, c.seed, mo);
        row.push_back(fmt(10.0 * std::log10(sigma * sigma / g.noise.rms_sq)));
      }
    double lb = lower_bound_std(fams[0].second, sigma);
    row.push_back(fmt(std::isnan(lb) ? 0.0 : std::max(0.0, 10.0 * std::log10(sigma * sigma / (lb * lb)))));
    t.rows.push_back(row);
  }
  Table be;
  be.name = "breakeven";
  be.units = "sigma_star: noise std beyond which no QEC gain remains";
  be.columns = {"ancilla", "estimator", "sigma_star"};
  be.plot = PlotKind::None;
  for (auto kind : {gkp::EstimatorKind::Linear, gkp::EstimatorKind::Mmse}) {
    double s = gkp::breakeven(fams[0].second, {kind}, trials, c.seed, mo);
    be.rows.push_back({"square", kind == gkp::EstimatorKind::Linear ? "linear" : "mmse", fmt(s)});
  }
  return {t, be};
}

std::vector<Table> fig21a(const RunContext& c) {
  long n = integer(c, "points");
  double lo = real(c, "kappa_dt_min"), hi = real(c, "kappa_dt_max");
  require(n >= 1 && lo > 0.0 && hi >= lo, "need points >= 1 and 0 < kappa_dt_min <= kappa_dt_max");
  const std::vector<std::pair<std::string, gkp::GkpLattice>> codes = {
      {"square", gkp::lattice_by_name("square")},
      {"hex", gkp::lattice_by_name("hex")},
      {"tesseract", gkp::lattice_by_name("tesseract")},
      {"d4", gkp::lattice_by_name("d4")}};
  Table t;
  t.name = "pe";
  t.units = "kappa_dt: loss per round; sigma2 = 1 - exp(-kappa_dt) after pre-amplification; pe_*: closed-form p_x + p_y + p_z";
  t.columns = {"kappa_dt", "sigma2"};
  for (const auto& cd : codes) t.columns.push_back("pe_" + cd.first);
  t.plot = PlotKind::LogLines;
  for (double k : grid(lo, hi, n, true)) {
    double s2 = gkp::loss_to_agn(std::exp(-k), 0.0, gkp::AmpPlacement::PreAmp);
    std::vector<std::string> row = {fmt(k), fmt(s2)};
    for (const auto& cd : codes) row.push_back(fmt(gkp::pauli_error_prob(cd.second, std::sqrt(s2)).p_e));
    t.rows.push_back(row);
  }
  return {t};
}

std::vector<Table> fig12(const RunContext& c) {
  const double delta = delta_of(c);
  const int dim = dim_of(c);
  LindbladRun run = lindblad("royer", delta, 0.0, 1.0, real(c, "gamma_t"), dim, integer(c, "records"),
                             start_state("vacuum", delta, dim));
  long pts = integer(c, "wigner_points");
  require(pts >= 2, "parameter 'wigner_points' must be >= 2");
  auto qs = grid(-4.5, 4.5, pts, false);
  return {lindblad_table(run), wigner_table(gkp::fock::wigner(run.traj.rho_final, qs, qs), qs, qs)};
}

}  // namespace

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> list = {
      {"lattice-info", "lattice data: Gram matrix, code dimension, Pauli distances",
       {{"name", ParamType::Text, "square", "square, canonical-square, rectangular, hex, canonical-hex, tesseract, d4, canonical-d4, e8, gkp-bell"},
        {"param", ParamType::Real, 0.0, "eta for rectangular"}},
       run_lattice_info},
      {"qubit-mc", "Monte Carlo logical error rates with closest-point decoding",
       {{"lattice", ParamType::Text, "square", "qubit lattice name"},
        {"param", ParamType::Real, 0.0, "eta for rectangular"},
        {"sigma", ParamType::Real, 0.2, "per-quadrature noise std"},
        {"trials", ParamType::Count, 1000000, "Monte Carlo trials"},
        {"coeff_bound", ParamType::Integer, -1, "enumeration half-width (-1: automatic)"},
        {"closed_form", ParamType::Flag, false, "append the closed-form row"}},
       run_qubit_mc},
      {"o2o", "oscillator-to-oscillator code output noise",
       with(kO2OCommon, {{"sigma", ParamType::Real, 0.1, "per-quadrature noise std"},
                         {"gain", ParamType::Real, 0.0, "fixed TMS gain (0: optimize)"},
                         {"optimize_gain", ParamType::Flag, false, "optimize the gain"}}),
       run_o2o},
      {"o2o-sweep", "output noise versus input noise, gain optimized per point",
       with(kO2OCommon, {{"sigma_min", ParamType::Real, 0.05, "smallest noise std"},
                         {"sigma_max", ParamType::Real, 0.7, "largest noise std"},
                         {"points", ParamType::Integer, 14, "number of sigma values"},
                         {"log", ParamType::Flag, false, "logarithmic sigma spacing"}}),
       run_o2o_sweep},
      {"breakeven", "noise level beyond which the code gives no QEC gain",
       with(kO2OCommon, {{"tol", ParamType::Real, 0.005, "bisection tolerance in sigma"},
                         {"lo", ParamType::Real, 0.5, "lower bracket"},
                         {"hi", ParamType::Real, 1.0 / std::sqrt(2.0), "upper bracket"}}),
       run_breakeven},
      {"capacity", "closed-form quantum capacity bounds",
       {{"channel", ParamType::Text, "loss", "loss, agn, or amp"},
        {"eta", ParamType::Real, 0.9, "transmittance"},
        {"nbar", ParamType::Real, 0.0, "thermal photon number"},
        {"sigma2", ParamType::Real, 0.1, "AGN variance"},
        {"n_modes", ParamType::Integer, 1, "AGN mode count"},
        {"gain", ParamType::Real, 2.0, "amplifier gain"}},
       run_capacity},
      {"fock-sbs", "small-big-small stabilization rounds in truncated Fock space",
       {{"delta", ParamType::Real, 0.3, "finite-energy parameter Delta"},
        {"rounds", ParamType::Integer, 30, "XZ cycles"},
        {"dim", ParamType::Integer, 120, "oscillator truncation"},
        {"start", ParamType::Text, "vacuum", "vacuum, zero, or one"}},
       run_fock_sbs},
      {"fock-lindblad", "Lindblad evolution with GKP or noise dissipators",
       {{"dissipators", ParamType::Text, "royer", "comma list of royer, sellem, loss, dephasing, agn"},
        {"delta", ParamType::Real, 0.2, "finite-energy parameter Delta"},
        {"kappa", ParamType::Real, 0.0, "rate for loss, dephasing, agn"},
        {"rate", ParamType::Real, 1.0, "rate Gamma for the GKP dissipators"},
        {"gamma_t", ParamType::Real, 10.0, "final time (units of 1/Gamma)"},
        {"dim", ParamType::Integer, 120, "oscillator truncation"},
        {"records", ParamType::Integer, 100, "approximate number of output rows"},
        {"start", ParamType::Text, "vacuum", "vacuum, zero, or one"}},
       run_fock_lindblad},
      {"fock-spectrum", "finite-energy GKP Hamiltonian spectrum",
       {{"omega0", ParamType::Real, 1.0, "harmonic confinement frequency"},
        {"e_q", ParamType::Real, 50.0, "position cosine strength"},
        {"e_p", ParamType::Real, 50.0, "momentum cosine strength"},
        {"eta", ParamType::Real, 1.0, "aspect ratio"},
        {"d", ParamType::Integer, 2, "code dimension"},
        {"dim", ParamType::Integer, 260, "oscillator truncation"},
        {"keep", ParamType::Integer, 6, "eigenpairs reported"}},
       run_fock_spectrum},
      {"wigner", "Wigner function on a grid",
       {{"state", ParamType::Text, "zero", "zero, one, plus, minus, canonical, fock"},
        {"n", ParamType::Integer, 0, "Fock level for state=fock"},
        {"delta", ParamType::Real, 0.3, "finite-energy parameter Delta"},
        {"dim", ParamType::Integer, 120, "oscillator truncation"},
        {"q_max", ParamType::Real, 4.5, "grid half-width in q"},
        {"p_max", ParamType::Real, 4.5, "grid half-width in p"},
        {"points", ParamType::Integer, 61, "grid points per axis"}},
       run_wigner},
  };
  return list;
}

const std::vector<Experiment>& figures() {
  static const std::vector<Experiment> list = {
      {"fig24", "single-mode TMS output noise over canonical ancilla lattices",
       {{"sigma2", ParamType::Real, 0.01, "input noise variance"},
        {"trials", ParamType::Count, 100000, "Monte Carlo trials per evaluation"},
        {"r_max", ParamType::Real, 0.6, "largest ancilla squeezing"},
        {"r_points", ParamType::Integer, 7, "squeezing grid points"},
        {"theta_points", ParamType::Integer, 8, "rotation grid points over [0, pi/2)"}},
       fig24},
      {"fig25", "QEC gain versus noise for square, hex, and D4 ancillas",
       {{"trials", ParamType::Count, 20000, "Monte Carlo trials per evaluation"},
        {"sigma_min", ParamType::Real, 0.1, "smallest noise std"},
        {"sigma_max", ParamType::Real, 0.7, "largest noise std"},
        {"points", ParamType::Integer, 13, "number of sigma values"}},
       fig25},
      {"fig21a", "closed-form error probability of multimode qubit codes under converted loss",
       {{"kappa_dt_min", ParamType::Real, 0.02, "smallest loss"},
        {"kappa_dt_max", ParamType::Real, 0.3, "largest loss"},
        {"points", ParamType::Integer, 40, "grid points (log spaced)"}},
       fig21a},
      {"fig12-analog", "modular dissipator stabilization from vacuum",
       {{"delta", ParamType::Real, 0.2, "finite-energy parameter Delta"},
        {"gamma_t", ParamType::Real, 10.0, "final time"},
        {"dim", ParamType::Integer, 120, "oscillator truncation"},
        {"records", ParamType::Integer, 100, "approximate number of output rows"},
        {"wigner_points", ParamType::Integer, 41, "final-state Wigner grid points per axis"}},
       fig12},
  };
  return list;
}

const Experiment* find_in(const std::vector<Experiment>& list, const std::string& name) {
  for (const auto& e : list)
    if (e.name == name) return &e;
  return nullptr;
}

json normalize_params(const Experiment& e, const json& given) {
  if (!given.is_object()) throw ConfigError("'params' must be an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    bool known = false;
    for (const auto& p : e.params) known = known || p.name == it.key();
    if (!known) throw ConfigError("unknown parameter '" + it.key() + "' for " + e.name);
  }
  json out = json::object();
  for (const auto& p : e.params) {
    json v = given.contains(p.name) ? given.at(p.name) : p.def;
    const std::string where = "parameter '" + p.name + "'";
    switch (p.type) {
      case ParamType::Real:
        if (!v.is_number()) throw ConfigError(where + " must be a number");
        out[p.name] = v.get<double>();
        break;
      case ParamType::Integer:
        if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
        out[p.name] = v.get<long>();
        break;
      case ParamType::Count: {
        if (!v.is_number()) throw ConfigError(where + " must be a number");
        double d = v.get<double>();
        if (!(d >= 0.0) || d != std::floor(d) || d > 1e15) throw ConfigError(where + " must be a whole number");
        out[p.name] = static_cast<long>(d);
        break;
      }
      case ParamType::Text:
        if (!v.is_string()) throw ConfigError(where + " must be a string");
        out[p.name] = v;
        break;
      case ParamType::Flag:
        if (!v.is_boolean()) throw ConfigError(where + " must be true or false");
        out[p.name] = v;
        break;
    }
  }
  return out;
}

}  // namespace gkplab
