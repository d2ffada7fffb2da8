// Compiled with -mavx2 on x86-64; only reached after a runtime CPU check.
#include "advsim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <limits>

namespace advsim::kernels::detail {

void cone_mask_avx2(const double* xs, const double* ys, std::size_t n, const ConeQuery& q, std::uint8_t* out) {
  const __m256d cx = _mm256_set1_pd(q.cx);
  const __m256d cy = _mm256_set1_pd(q.cy);
  const __m256d r2 = _mm256_set1_pd(q.range * q.range);
  const __m256d hx = _mm256_set1_pd(q.heading_x);
  const __m256d hy = _mm256_set1_pd(q.heading_y);
  const __m256d cos_half = _mm256_set1_pd(q.cos_half_fov);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), cx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), cy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    __m256d inside = _mm256_cmp_pd(d2, r2, _CMP_LE_OQ);
    if (!q.full_circle) {
      const __m256d dot = _mm256_add_pd(_mm256_mul_pd(dx, hx), _mm256_mul_pd(dy, hy));
      const __m256d bound = _mm256_mul_pd(_mm256_sqrt_pd(d2), cos_half);
      inside = _mm256_and_pd(inside, _mm256_cmp_pd(dot, bound, _CMP_GE_OQ));
    }
    const int bits = _mm256_movemask_pd(inside);
    out[i + 0] = static_cast<std::uint8_t>(bits & 1);
    out[i + 1] = static_cast<std::uint8_t>((bits >> 1) & 1);
    out[i + 2] = static_cast<std::uint8_t>((bits >> 2) & 1);
    out[i + 3] = static_cast<std::uint8_t>((bits >> 3) & 1);
  }
  cone_mask_scalar(xs + i, ys + i, n - i, q, out + i);
}

std::size_t nearest_index_avx2(const double* xs, const double* ys, std::size_t n, double px, double py) {
  if (n < 8) return nearest_index_scalar(xs, ys, n, px, py);
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  __m256d best_d2 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256i best_idx = _mm256_setzero_si256();
  __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  const __m256i step = _mm256_set1_epi64x(4);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const __m256d better = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
    best_d2 = _mm256_blendv_pd(best_d2, d2, better);
    best_idx = _mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), better));
    idx = _mm256_add_epi64(idx, step);
  }

  alignas(32) double lane_d2[4];
  alignas(32) std::int64_t lane_idx[4];
  _mm256_store_pd(lane_d2, best_d2);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_idx), best_idx);

  // Each lane holds its first minimum; the overall first minimum is the
  // smallest distance, then the smallest index among equal distances.
  double d2_min = lane_d2[0];
  std::size_t best = static_cast<std::size_t>(lane_idx[0]);
  for (int lane = 1; lane < 4; ++lane) {
    const auto candidate = static_cast<std::size_t>(lane_idx[lane]);
    if (lane_d2[lane] < d2_min || (lane_d2[lane] == d2_min && candidate < best)) {
      d2_min = lane_d2[lane];
      best = candidate;
    }
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    const double d2 = dx * dx + dy * dy;
    if (d2 < d2_min) {
      d2_min = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace advsim::kernels::detail

#else

namespace advsim::kernels::detail {
void cone_mask_avx2(const double* xs, const double* ys, std::size_t n, const ConeQuery& q, std::uint8_t* out) {
  cone_mask_scalar(xs, ys, n, q, out);
}
std::size_t nearest_index_avx2(const double* xs, const double* ys, std::size_t n, double px, double py) {
  return nearest_index_scalar(xs, ys, n, px, py);
}
}  // namespace advsim::kernels::detail

#endif
