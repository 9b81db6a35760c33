#include "gkp/channels.hpp"

#include <limits>

namespace gkp {

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw Error(ErrorCode::InvalidTransmittance, "transmittance must lie in (0, 1]");
}

void check_psd(const Mat& y) {
  if (y.rows() != y.cols() || y.rows() == 0 || y.rows() % 2)
    throw Error(ErrorCode::InvalidDimension, "noise matrix must be square with even size");
  double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if ((y - y.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw Error(ErrorCode::NotPositiveDefinite, "noise matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(y);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw Error(ErrorCode::NotPositiveDefinite, "noise matrix has a negative eigenvalue");
}

}  // namespace

void validate(const NoiseSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AgnNoise>) {
          check_psd(s.Y);
        } else if constexpr (std::is_same_v<T, LossNoise>) {
          check_eta(s.eta);
          if (!(s.nbar >= 0.0)) throw Error(ErrorCode::InvalidParameter, "nbar must be >= 0");
        } else {
          if (!(s.gain >= 1.0)) throw Error(ErrorCode::InvalidGain, "amplifier gain must be >= 1");
          if (!(s.nbar >= 0.0)) throw Error(ErrorCode::InvalidParameter, "nbar must be >= 0");
        }
      },
      spec);
}

GaussianSampler::GaussianSampler(const Mat& y) {
  check_psd(y);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (y + y.transpose()));
  Vec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = es.eigenvectors() * lam.asDiagonal();
}

double loss_to_agn(double eta, double nbar, AmpPlacement mode) {
  check_eta(eta);
  if (!(nbar >= 0.0)) throw Error(ErrorCode::InvalidParameter, "nbar must be >= 0");
  double s = (1.0 - eta) * (1.0 + 2.0 * nbar);
  return mode == AmpPlacement::PreAmp ? s : s / eta;
}

double teleport_agn(double eta, double r) {
  if (!(eta > 0.0 && eta <= 1.0) || !(r >= 0.0))
    throw Error(ErrorCode::InvalidParameter, "teleport_agn needs 0 < eta <= 1 and r >= 0");
  double se = std::sqrt(eta);
  return se * std::exp(-2.0 * r) + 1.0 - se;
}

double thermal_entropy(double n) {
  if (n <= 0.0) return 0.0;
  return (n + 1.0) * std::log2(n + 1.0) - n * std::log2(n);
}

CapacityBounds capacity_bounds(const NoiseSpec& spec) {
  validate(spec);
  CapacityBounds b;
  if (const auto* loss = std::get_if<LossNoise>(&spec)) {
    double eta = loss->eta, n = loss->nbar;
    if (eta == 1.0) {
      b.lower = b.upper = std::numeric_limits<double>::infinity();
      return b;
    }
    double lo = std::log2(eta / (1.0 - eta)) - thermal_entropy(n);
    double arg = (eta - (1.0 - eta) * n) / ((1.0 - eta) * (1.0 + n));
    b.upper = arg <= 1.0 ? 0.0 : std::log2(arg);
    b.lower_vacuous = lo < 0.0;
    b.lower = std::max(lo, 0.0);
    return b;
  }
  if (const auto* agn = std::get_if<AgnNoise>(&spec)) {
    int n_modes = static_cast<int>(agn->Y.rows() / 2);
    double det = agn->Y.determinant();
    if (det <= 0.0) {
      b.lower = b.upper = std::numeric_limits<double>::infinity();
      return b;
    }
    double sd = std::sqrt(det);
    double lo = std::log2(1.0 / (std::exp(static_cast<double>(n_modes)) * sd));
    double arg = (1.0 - sd) / sd;
    b.upper = arg <= 1.0 ? 0.0 : std::log2(arg);
    b.lower_vacuous = lo < 0.0;
    b.lower = std::max(lo, 0.0);
    return b;
  }
  throw Error(ErrorCode::InvalidParameter, "no closed-form capacity bounds for amplifier channels");
}

}  // namespace gkp
