#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gkp/common.hpp"

namespace gkp {

inline constexpr double kSymplecticTol = 1e-10;

// Block-diagonal symplectic form for (q1,p1,...,qN,pN) ordering.
Mat omega(int n_modes);

bool is_symplectic(const Mat& s, double tol = kSymplecticTol);

Mat rotation(double phi);
// Single-mode squeezer diag(e^r, e^-r).
Mat squeezer(double r);
Mat beamsplitter(double theta);
Mat two_mode_squeezer(double gain);
Mat sum_gate();

enum class GateKind { Rotation, Squeeze, Beamsplitter, TwoModeSqueeze, Sum, Identity };

struct Gate {
  GateKind kind;
  double param = 0.0;
};

// Embeds a standard gate acting on `targets` into an n_modes-mode symplectic matrix.
Mat standard_gate(const Gate& gate, std::span<const int> targets, int n_modes);

// Embeds an arbitrary 2k x 2k matrix on the listed modes.
Mat embed(const Mat& g, std::span<const int> targets, int n_modes);

struct Williamson {
  Mat S;   // S Y S^T = diag(nu)
  Vec nu;  // 2N entries, pairs (nu_i, nu_i), non-increasing
};

Williamson williamson(const Mat& y);

Mat compose(const Mat& a, const Mat& b);
Mat direct_sum(const Mat& a, const Mat& b);
Mat apply_to_covariance(const Mat& s, const Mat& y);

// Throws InvalidDimension unless m is square with even size.
void require_phase_space_square(const Mat& m, const char* what);

}  // namespace gkp
