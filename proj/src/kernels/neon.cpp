#include "advsim/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

#include <limits>

namespace advsim::kernels::detail {

// Separate vmulq/vaddq (no vfmaq) so results round exactly like the scalar path.
void cone_mask_neon(const double* xs, const double* ys, std::size_t n, const ConeQuery& q, std::uint8_t* out) {
  const float64x2_t cx = vdupq_n_f64(q.cx);
  const float64x2_t cy = vdupq_n_f64(q.cy);
  const float64x2_t r2 = vdupq_n_f64(q.range * q.range);
  const float64x2_t hx = vdupq_n_f64(q.heading_x);
  const float64x2_t hy = vdupq_n_f64(q.heading_y);
  const float64x2_t cos_half = vdupq_n_f64(q.cos_half_fov);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs + i), cx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys + i), cy);
    const float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    uint64x2_t inside = vcleq_f64(d2, r2);
    if (!q.full_circle) {
      const float64x2_t dot = vaddq_f64(vmulq_f64(dx, hx), vmulq_f64(dy, hy));
      const float64x2_t bound = vmulq_f64(vsqrtq_f64(d2), cos_half);
      inside = vandq_u64(inside, vcgeq_f64(dot, bound));
    }
    out[i + 0] = vgetq_lane_u64(inside, 0) ? 1 : 0;
    out[i + 1] = vgetq_lane_u64(inside, 1) ? 1 : 0;
  }
  cone_mask_scalar(xs + i, ys + i, n - i, q, out + i);
}

std::size_t nearest_index_neon(const double* xs, const double* ys, std::size_t n, double px, double py) {
  return nearest_index_scalar(xs, ys, n, px, py);
}

}  // namespace advsim::kernels::detail

#else

namespace advsim::kernels::detail {
void cone_mask_neon(const double* xs, const double* ys, std::size_t n, const ConeQuery& q, std::uint8_t* out) {
  cone_mask_scalar(xs, ys, n, q, out);
}
std::size_t nearest_index_neon(const double* xs, const double* ys, std::size_t n, double px, double py) {
  return nearest_index_scalar(xs, ys, n, px, py);
}
}  // namespace advsim::kernels::detail

#endif
