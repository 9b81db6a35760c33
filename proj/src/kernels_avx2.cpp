#include <immintrin.h>

#include <cmath>
#include <limits>

#include "gkp/kernels.hpp"

namespace gkp::kernels::avx2 {

namespace {

// e^x for x <= 0; lanes below -708 return exactly 0.
inline __m256d exp_nonpos(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(_mm256_sub_pd(x, _mm256_mul_pd(n, ln2_hi)), _mm256_mul_pd(n, ln2_lo));
  // Taylor polynomial to degree 13 on |r| <= ln2/2, Horner form.
  static constexpr double coef[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                                    1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                                    1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                                    1.0 / 24.0,         1.0 / 6.0,         0.5,
                                    1.0,                1.0};
  __m256d p = _mm256_set1_pd(coef[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(coef[i]));
  __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i e = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(ni), _mm256_set1_epi64x(1023)), 52);
  __m256d scale = _mm256_castsi256_pd(e);
  return _mm256_andnot_pd(under, _mm256_mul_pd(p, scale));
}

inline double hmax(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return std::max(std::max(t[0], t[1]), std::max(t[2], t[3]));
}

inline double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

}  // namespace

int argmin_distance(const double* r, const double* cand, const double* h, int dim, int count,
                    int stride) {
  const int groups = padded(count) / 4;
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d best_idx = _mm256_set1_pd(0.0);
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d four = _mm256_set1_pd(4.0);
  for (int g = 0; g < groups; ++g) {
    const int k = 4 * g;
    __m256d acc = _mm256_setzero_pd();
    for (int d = 0; d < dim; ++d)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(r[d]), _mm256_loadu_pd(cand + d * stride + k)));
    __m256d score = _mm256_sub_pd(_mm256_loadu_pd(h + k), acc);
    __m256d lt = _mm256_cmp_pd(score, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, score, lt);
    best_idx = _mm256_blendv_pd(best_idx, idx, lt);
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double bs[4], bi[4];
  _mm256_store_pd(bs, best);
  _mm256_store_pd(bi, best_idx);
  int out = 0;
  double out_score = std::numeric_limits<double>::infinity();
  for (int l = 0; l < 4; ++l) {
    int i = static_cast<int>(bi[l]);
    if (bs[l] < out_score || (bs[l] == out_score && i < out)) {
      out_score = bs[l];
      out = i;
    }
  }
  return out;
}

void softmax_mean(const double* s, const double* u, const double* c, const double* nvec, int sdim,
                  int ndim, int count, int stride, double* out) {
  const int n4 = padded(count);
  // Scores are recomputed in the second pass instead of stored; sdim is small.
  auto score = [&](int k) {
    __m256d acc = _mm256_setzero_pd();
    for (int d = 0; d < sdim; ++d)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(s[d]), _mm256_loadu_pd(u + d * stride + k)));
    return _mm256_sub_pd(acc, _mm256_loadu_pd(c + k));
  };
  __m256d vmax = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  for (int k = 0; k < n4; k += 4) vmax = _mm256_max_pd(vmax, score(k));
  const __m256d amax = _mm256_set1_pd(hmax(vmax));
  __m256d z = _mm256_setzero_pd();
  __m256d acc[16];
  for (int j = 0; j < ndim; ++j) acc[j] = _mm256_setzero_pd();
  for (int k = 0; k < n4; k += 4) {
    __m256d w = exp_nonpos(_mm256_sub_pd(score(k), amax));
    z = _mm256_add_pd(z, w);
    for (int j = 0; j < ndim; ++j)
      acc[j] = _mm256_add_pd(acc[j], _mm256_mul_pd(w, _mm256_loadu_pd(nvec + j * stride + k)));
  }
  double zs = hsum(z);
  for (int j = 0; j < ndim; ++j) out[j] = hsum(acc[j]) / zs;
}

}  // namespace gkp::kernels::avx2
