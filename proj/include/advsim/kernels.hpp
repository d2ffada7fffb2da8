#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace advsim::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa);

/// Widest available ISA, unless ADVSIM_SIMD=scalar|avx2|neon pins one.
Isa active_isa();

/// Range-and-field-of-view test around a center point. A node at offset d
/// passes when |d|^2 <= range^2 and, unless full_circle, d . heading >=
/// |d| cos(fov/2). Both bounds are inclusive.
struct ConeQuery {
  double cx = 0.0;
  double cy = 0.0;
  double range = 0.0;
  double heading_x = 1.0;  // unit vector
  double heading_y = 0.0;
  double cos_half_fov = -1.0;
  bool full_circle = true;
};

ConeQuery make_cone(double cx, double cy, double range, double heading, double fov);

/// out[i] = 1 when (xs[i], ys[i]) is inside the cone, else 0.
void cone_mask(Isa isa, std::span<const double> xs, std::span<const double> ys, const ConeQuery& query,
               std::span<std::uint8_t> out);
inline void cone_mask(std::span<const double> xs, std::span<const double> ys, const ConeQuery& query,
                      std::span<std::uint8_t> out) {
  cone_mask(active_isa(), xs, ys, query, out);
}

/// Index of the point closest to (px, py); ties go to the lowest index.
/// Requires a non-empty input.
std::size_t nearest_index(Isa isa, std::span<const double> xs, std::span<const double> ys, double px, double py);
inline std::size_t nearest_index(std::span<const double> xs, std::span<const double> ys, double px, double py) {
  return nearest_index(active_isa(), xs, ys, px, py);
}

namespace detail {
void cone_mask_scalar(const double* xs, const double* ys, std::size_t n, const ConeQuery& q, std::uint8_t* out);
std::size_t nearest_index_scalar(const double* xs, const double* ys, std::size_t n, double px, double py);
void cone_mask_avx2(const double* xs, const double* ys, std::size_t n, const ConeQuery& q, std::uint8_t* out);
std::size_t nearest_index_avx2(const double* xs, const double* ys, std::size_t n, double px, double py);
void cone_mask_neon(const double* xs, const double* ys, std::size_t n, const ConeQuery& q, std::uint8_t* out);
std::size_t nearest_index_neon(const double* xs, const double* ys, std::size_t n, double px, double py);
}  // namespace detail

}  // namespace advsim::kernels
