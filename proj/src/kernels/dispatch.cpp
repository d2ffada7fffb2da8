#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "advsim/error.hpp"
#include "advsim/kernels.hpp"

namespace advsim::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() {
  if (const char* forced = std::getenv("ADVSIM_SIMD")) {
    const std::string name(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == to_string(isa) && isa_available(isa)) return isa;
    }
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

void check_sizes(std::size_t xs, std::size_t ys) {
  if (xs != ys) throw Error(ErrorKind::InvalidArgument, "coordinate arrays differ in length");
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

ConeQuery make_cone(double cx, double cy, double range, double heading, double fov) {
  ConeQuery q;
  q.cx = cx;
  q.cy = cy;
  q.range = range;
  q.heading_x = std::cos(heading);
  q.heading_y = std::sin(heading);
  q.full_circle = fov >= 2.0 * std::numbers::pi;
  q.cos_half_fov = q.full_circle ? -1.0 : std::cos(fov / 2.0);
  return q;
}

void cone_mask(Isa isa, std::span<const double> xs, std::span<const double> ys, const ConeQuery& query,
               std::span<std::uint8_t> out) {
  check_sizes(xs.size(), ys.size());
  if (out.size() != xs.size()) throw Error(ErrorKind::InvalidArgument, "mask size differs from input");
  if (!isa_available(isa)) isa = Isa::Scalar;
  switch (isa) {
    case Isa::Avx2: detail::cone_mask_avx2(xs.data(), ys.data(), xs.size(), query, out.data()); return;
    case Isa::Neon: detail::cone_mask_neon(xs.data(), ys.data(), xs.size(), query, out.data()); return;
    case Isa::Scalar: break;
  }
  detail::cone_mask_scalar(xs.data(), ys.data(), xs.size(), query, out.data());
}

std::size_t nearest_index(Isa isa, std::span<const double> xs, std::span<const double> ys, double px, double py) {
  check_sizes(xs.size(), ys.size());
  if (xs.empty()) throw Error(ErrorKind::InvalidArgument, "nearest_index on empty input");
  if (!isa_available(isa)) isa = Isa::Scalar;
  switch (isa) {
    case Isa::Avx2: return detail::nearest_index_avx2(xs.data(), ys.data(), xs.size(), px, py);
    case Isa::Neon: return detail::nearest_index_neon(xs.data(), ys.data(), xs.size(), px, py);
    case Isa::Scalar: break;
  }
  return detail::nearest_index_scalar(xs.data(), ys.data(), xs.size(), px, py);
}

}  // namespace advsim::kernels
