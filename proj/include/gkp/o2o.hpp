#pragma once

#include <cstdint>
#include <vector>

#include "gkp/lattice.hpp"

namespace gkp {

struct O2OCode {
  int n_data = 0, n_ancilla = 0;
  Mat S_enc;  // data modes first, then ancilla modes
  GkpLattice ancilla;
  std::vector<double> gains;
};

O2OCode tms_code(const std::vector<double>& gains, const GkpLattice& ancilla);
O2OCode sq_rep_code(double lambda, double kappa);

struct NoiseBlocks {
  Mat V_d, V_a, V_da, V_d_given_a;
};

NoiseBlocks noise_blocks(const O2OCode& code, const Mat& y);

enum class EstimatorKind { Linear, Mmse };

struct Estimator {
  EstimatorKind kind = EstimatorKind::Mmse;
  int n_max = 3;
  bool auto_n_max = true;  // raise n_max until the estimate moves < 1e-4
};

// Precomputed estimator f(s) for a fixed set of noise blocks.
class SyndromeEstimator {
 public:
  SyndromeEstimator(const NoiseBlocks& blocks, const Estimator& est);
  // Writes f(s) (2N entries) to out; s has 2M entries.
  void operator()(const double* s, double* out) const;
  Vec operator()(const Vec& s) const;
  int n_max() const { return n_max_; }
  int terms() const { return count_; }

 private:
  void build_terms(int n_max);
  Mat B_;  // -V_d^{-1} V_da
  Mat V_;  // V_{d|a}
  EstimatorKind kind_;
  int n_max_ = 0, sdim_ = 0, count_ = 0, stride_ = 0;
  std::vector<double> u_, c_, n_;
};

Vec estimate(const NoiseBlocks& blocks, const Vec& s, const Estimator& est);

struct OutputNoise {
  Mat V_out;
  double rms_sq = 0.0, gm_sq = 0.0;
  long trials = 0;
  double stderr_rms_sq = 0.0;
};

enum class Sampler { Conditional, Direct };

struct MonteCarloOptions {
  Sampler sampler = Sampler::Conditional;
  int threads = 1;
  double mixture_scale = 2.0;  // wide component of the defensive mixture
};

OutputNoise mc_output(const O2OCode& code, const Mat& y, const Estimator& est, long trials,
                      std::uint64_t seed, const MonteCarloOptions& opt = {});

// Code family for gain optimization: TMS pairs between N data modes and the
// ancilla lattice, one shared gain, iid noise of variance sigma^2.
struct TmsFamily {
  GkpLattice ancilla;
  int n_data = 1;
};

struct GainResult {
  double gain = 1.0;
  OutputNoise noise;
  bool at_boundary = false;
  int evaluations = 0;
};

struct GainSearch {
  double g_max = 0.0;  // 0: max(10, 4/sigma^2)
  int grid = 24;
  double rel_tol = 1e-3;
};

GainResult optimize_gain(const TmsFamily& family, double sigma, const Estimator& est, long trials,
                         std::uint64_t seed, const MonteCarloOptions& opt = {},
                         const GainSearch& search = {});

struct LowerBound {
  double sigma_lb = 0.0;
  bool vacuous = false;
};

LowerBound sigma_lower_bound(const std::vector<double>& sigmas, int n_data);
double no_threshold_rhs(const std::vector<double>& gains, double sigma);

struct BreakevenOptions {
  double lo = 0.5, hi = 1.0 / std::numbers::sqrt2, tol = 0.005;
};

double breakeven(const TmsFamily& family, const Estimator& est, long trials, std::uint64_t seed,
                 const MonteCarloOptions& opt = {}, const BreakevenOptions& bopt = {});

// Closed-form small-noise law for the linear GKP-TMS code (variance units).
double tms_linear_asymptotic(double sigma);

}  // namespace gkp
