#pragma once

#include <random>
#include <variant>

#include "gkp/common.hpp"

namespace gkp {

struct AgnNoise {
  Mat Y;
};
struct LossNoise {
  double eta;
  double nbar = 0.0;
};
struct AmpNoise {
  double gain;
  double nbar = 0.0;
};
using NoiseSpec = std::variant<AgnNoise, LossNoise, AmpNoise>;

void validate(const NoiseSpec& spec);

// Draws xi ~ N(0, Y) from a precomputed factor F with F F^T = Y.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Mat& y);
  template <class Rng>
  Vec operator()(Rng& rng) const {
    std::normal_distribution<double> nd;
    Vec z(factor_.cols());
    for (int i = 0; i < z.size(); ++i) z(i) = nd(rng);
    return factor_ * z;
  }
  const Mat& factor() const { return factor_; }

 private:
  Mat factor_;
};

template <class Rng>
Vec sample_agn(const Mat& y, Rng& rng) {
  return GaussianSampler(y)(rng);
}

enum class AmpPlacement { PreAmp, PostAmp };

double loss_to_agn(double eta, double nbar, AmpPlacement mode);
double teleport_agn(double eta, double r);

// Entropy of a thermal state with mean photon number n, in bits.
double thermal_entropy(double n);

struct CapacityBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_vacuous = false;
};

CapacityBounds capacity_bounds(const NoiseSpec& spec);

}  // namespace gkp
