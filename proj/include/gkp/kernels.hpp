#pragma once

// Hot loops with a scalar reference and an AVX2 variant chosen at runtime.
// Candidate data is structure-of-arrays: element (d, k) lives at d*stride + k,
// with stride a multiple of 4 and padding columns set to zero coordinates and
// +inf half norms (argmin) or +inf offsets c (softmax).

namespace gkp::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
// Forces a kernel family (Avx2 is ignored when the CPU lacks it). For tests.
void force_isa(Isa isa);
void reset_isa();
bool cpu_has_avx2();

inline int padded(int count) { return (count + 3) & ~3; }

// argmin_k (half_norm2[k] - r . cand[:, k]); first index wins ties.
int argmin_distance(const double* r, const double* cand, const double* half_norm2, int dim,
                    int count, int stride);

// a_k = s . u[:, k] - c[k]; out = sum_k e^{a_k} n[:, k] / sum_k e^{a_k}.
void softmax_mean(const double* s, const double* u, const double* c, const double* nvec, int sdim,
                  int ndim, int count, int stride, double* out);

namespace scalar {
int argmin_distance(const double*, const double*, const double*, int, int, int);
void softmax_mean(const double*, const double*, const double*, const double*, int, int, int, int,
                  double*);
}  // namespace scalar

namespace avx2 {
int argmin_distance(const double*, const double*, const double*, int, int, int);
void softmax_mean(const double*, const double*, const double*, const double*, int, int, int, int,
                  double*);
}  // namespace avx2

}  // namespace gkp::kernels
