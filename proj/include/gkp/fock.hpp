#pragma once

#include <string>
#include <vector>

#include "gkp/common.hpp"

namespace gkp::fock {

struct Ops {
  CMat a, adag, n, q, p;
};

Ops operators(int dim);

// <m|D(alpha)|n> from the closed-form Laguerre expression (exact entries of
// the infinite matrix, truncated). D(alpha) = exp(alpha a^dag - alpha^* a).
CMat displacement_op(cplx alpha, int dim);
// E_Delta D(alpha) E_Delta^{-1} with E_Delta = exp(-Delta^2 n).
CMat finite_energy_displacement(cplx alpha, double delta, int dim);

// Square-qubit stabilizers and Paulis as displacements.
inline cplx stabilizer_q_alpha() { return {0.0, kEll}; }        // exp(i 2 sqrt(pi) q)
inline cplx stabilizer_p_alpha() { return {kEll, 0.0}; }        // exp(-i 2 sqrt(pi) p)
inline cplx logical_z_alpha() { return {0.0, kEll / 2.0}; }     // exp(i sqrt(pi) q)
inline cplx logical_x_alpha() { return {kEll / 2.0, 0.0}; }     // exp(-i sqrt(pi) p)

enum class Logical { Zero, One, Canonical };
enum class StateForm { Envelope, Comb };

struct GkpFockParams {
  double delta = 0.3;
  Logical logical = Logical::Zero;
  int t_max = 0;  // 0: enough peaks to cover the truncated space
  int dim = 120;
  StateForm form = StateForm::Envelope;
};

struct GkpState {
  CVec psi;
  double leakage = 0.0;  // population at levels >= dim - 5 before truncation
};

GkpState gkp_state(const GkpFockParams& params);

// Normalized Hermite functions psi_0..psi_{count-1} at x.
std::vector<double> hermite_functions(double x, int count);
// Position wavefunction of a Fock-basis state.
cplx wavefunction(const CVec& psi, double x);

Mat wigner(const CVec& psi, const std::vector<double>& qs, const std::vector<double>& ps);
Mat wigner(const CMat& rho, const std::vector<double>& qs, const std::vector<double>& ps);

enum class Axis { X, Z };

// Z = sgn cos(sqrt(pi) q), X = sgn cos(sqrt(pi) p), as spectral functions.
CMat generalized_pauli(Axis axis, int dim);

// f applied to the spectrum of a Hermitian matrix.
template <class F>
CMat spectral(const CMat& h, F&& f) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  Vec lam = es.eigenvalues();
  CVec fl(lam.size());
  for (int i = 0; i < lam.size(); ++i) fl(i) = f(lam(i));
  return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().adjoint();
}

struct SbsRound {
  CMat U;       // (oscillator x qubit), index 2*n + b
  CMat K_g, K_e;
};

// |g> is the sigma_z = -1 qubit state.
SbsRound sbs_round(Axis axis, double delta, int dim);

struct SbsPoint {
  int round;
  double n_mean;
  cplx s_q, s_p;          // finite-energy stabilizers
  cplx s_q_ideal, s_p_ideal;
  double z, x;            // generalized Paulis
};

std::vector<SbsPoint> evolve_sbs(CMat rho, double delta, int rounds);

CMat apply_kraus(const CMat& rho, const std::vector<CMat>& kraus);

enum class DissipatorKind { RoyerModular, SellemApprox, Loss, Dephasing, Agn };

struct DissipatorSpec {
  DissipatorKind kind;
  double param = 0.0;  // Delta for the GKP kinds, kappa otherwise
  double rate = 1.0;   // multiplies L^dag L (sqrt(rate) is folded into L)
  double xi = 2.0 * kSqrtPi;
};

std::vector<CMat> dissipator_set(const DissipatorSpec& spec, int dim);

// Centered modular quadrature (bin width m, centered at 0) as a spectral function.
CMat modular_quadrature(const CMat& x, double m);

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<cplx>> values;  // one row per record, one column per observable
  double max_trace_drift = 0.0;
  CMat rho_final;
};

struct LindbladOptions {
  double dt = 0.0;  // 0: largest step satisfying the stability precondition
  long steps = 0;
  double t_final = 0.0;  // used when steps == 0
  int record_every = 1;
};

double max_jump_norm(const std::vector<CMat>& ls);

Trajectory lindblad_evolve(CMat rho, const CMat& h, const std::vector<CMat>& ls,
                           const std::vector<CMat>& observables, const LindbladOptions& opt);

struct Spectrum {
  CMat H;
  Vec energies;          // ascending, lowest `keep`
  CMat states;           // columns
  double splitting = 0.0;
  double gap = 0.0;
  double leakage = 0.0;
};

Spectrum gkp_hamiltonian(double omega0, double e_q, double e_p, double eta, int d, int dim,
                         int keep = 6);

struct TwirlNoise {
  double sigma2;
  double squeezing_db;
};

TwirlNoise twirl_noise(double delta);

double mean_photon(const CMat& rho);
CMat projector(const CVec& psi);

}  // namespace gkp::fock
