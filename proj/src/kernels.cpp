#include "gkp/kernels.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "gkp/rng.hpp"

namespace gkp::kernels {

namespace {
std::atomic<int> g_forced{-1};
}

bool cpu_has_avx2() {
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
}

Isa active_isa() {
  int f = g_forced.load(std::memory_order_relaxed);
  if (f == static_cast<int>(Isa::Scalar)) return Isa::Scalar;
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

void force_isa(Isa isa) { g_forced.store(static_cast<int>(isa)); }
void reset_isa() { g_forced.store(-1); }

int argmin_distance(const double* r, const double* cand, const double* h, int dim, int count,
                    int stride) {
  if (active_isa() == Isa::Avx2) return avx2::argmin_distance(r, cand, h, dim, count, stride);
  return scalar::argmin_distance(r, cand, h, dim, count, stride);
}

void softmax_mean(const double* s, const double* u, const double* c, const double* nvec, int sdim,
                  int ndim, int count, int stride, double* out) {
  if (active_isa() == Isa::Avx2 && ndim <= 16)
    return avx2::softmax_mean(s, u, c, nvec, sdim, ndim, count, stride, out);
  scalar::softmax_mean(s, u, c, nvec, sdim, ndim, count, stride, out);
}

namespace scalar {

int argmin_distance(const double* r, const double* cand, const double* h, int dim, int count,
                    int stride) {
  int best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) acc += r[d] * cand[d * stride + k];
    double score = h[k] - acc;
    if (score < best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

void softmax_mean(const double* s, const double* u, const double* c, const double* nvec, int sdim,
                  int ndim, int count, int stride, double* out) {
  std::vector<double> a(count);
  double amax = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    double acc = 0.0;
    for (int d = 0; d < sdim; ++d) acc += s[d] * u[d * stride + k];
    a[k] = acc - c[k];
    if (a[k] > amax) amax = a[k];
  }
  double z = 0.0;
  for (int j = 0; j < ndim; ++j) out[j] = 0.0;
  for (int k = 0; k < count; ++k) {
    double w = std::exp(a[k] - amax);
    z += w;
    for (int j = 0; j < ndim; ++j) out[j] += w * nvec[j * stride + k];
  }
  for (int j = 0; j < ndim; ++j) out[j] /= z;
}

}  // namespace scalar
}  // namespace gkp::kernels

namespace gkp {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  int t = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(n)));
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace gkp
