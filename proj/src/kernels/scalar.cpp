#include <cmath>

#include "advsim/kernels.hpp"

namespace advsim::kernels::detail {

void cone_mask_scalar(const double* xs, const double* ys, std::size_t n, const ConeQuery& q, std::uint8_t* out) {
  const double r2 = q.range * q.range;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - q.cx;
    const double dy = ys[i] - q.cy;
    const double d2 = dx * dx + dy * dy;
    bool inside = d2 <= r2;
    if (inside && !q.full_circle) {
      const double dot = dx * q.heading_x + dy * q.heading_y;
      inside = dot >= std::sqrt(d2) * q.cos_half_fov;
    }
    out[i] = inside ? 1 : 0;
  }
}

std::size_t nearest_index_scalar(const double* xs, const double* ys, std::size_t n, double px, double py) {
  std::size_t best = 0;
  double best_d2 = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace advsim::kernels::detail
