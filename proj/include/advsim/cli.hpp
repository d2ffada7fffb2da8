#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace advsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitCorrupt = 4;

/// Entry point of the advsim command; `args` excludes the program name.
///
/// Stable stdout lines (space-separated key=value):
///   run      turn=<n> winner=<team|draw|none> wall_ms=<ms>
///            recording=<path> bytes=<n>          (when a recording is written)
///   convert  nodes=<n> edges=<n>
///   replay   turns=<n> terminated=<true|false> final_hash=<16 hex>
///   check    check=ok turns=<n> events=<n>       (or check=failed)
///   bench    turns=<n> turns_per_second=<x> peak_events=<n> final_hash=<16 hex>
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace advsim
