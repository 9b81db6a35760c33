#pragma once

#include <cstdint>
#include <vector>

#include "gkp/lattice.hpp"

namespace gkp {

struct ErrorRates {
  double p_x = 0, p_y = 0, p_z = 0, p_e = 0;
  long trials = 0;  // 0 for closed form
  double se_x = 0, se_y = 0, se_z = 0;
  long n_x = 0, n_y = 0, n_z = 0;
};

ErrorRates pauli_error_prob(const GkpLattice& l, double sigma);

// Brute-force closest point of the lattice spanned by the columns of `basis`
// (physical units). The enumeration box of half-width `bound` is centered on
// the Babai rounding point; a minimizer on the box boundary is rejected.
class ClosestPoint {
 public:
  ClosestPoint(const Mat& basis, int bound);
  // Returns the lattice point; coeff (optional) receives its integer coordinates.
  Vec nearest(const Vec& e, Eigen::VectorXi* coeff = nullptr) const;
  int bound() const { return bound_; }

 private:
  Mat basis_, inv_;
  int dim_, bound_, count_, stride_;
  std::vector<double> cand_, half_norm_;
  std::vector<int> offsets_;  // dim_ x count_ integer offsets, row-major by candidate
};

int default_coeff_bound(const Mat& basis_unitless, double sigma);

// Closest point of ell*M to e (box of half-width coeff_bound around the Babai point).
Vec cvp_decode(const GkpLattice& l, const Vec& e, int coeff_bound = 2);

struct McOptions {
  int threads = 1;
  long chunk = 16384;
  int coeff_bound = -1;
};

ErrorRates mc_logical_rates(const GkpLattice& l, double sigma, long trials, std::uint64_t seed,
                            const McOptions& opt = {});

}  // namespace gkp
