#pragma once

#include <functional>
#include <memory>
#include <span>

#include "advsim/context.hpp"

namespace advsim {

/// Builds a fresh strategy-free context for the scenario a recording claims.
using ContextFactory = std::function<std::unique_ptr<Context>()>;
/// Called with the context after each recorded turn has been applied.
using TurnCallback = std::function<void(Context& ctx, std::uint64_t turn)>;

/// Drives a fresh context through a recording. Older format versions are
/// translated first. Throws CorruptRecording, ConfigMismatch (seed or
/// digest differ from the factory's context) or UnsupportedVersion.
std::unique_ptr<Context> replay(std::span<const std::uint8_t> bytes, const ContextFactory& factory,
                                const TurnCallback& on_turn = {});

/// Replays while recording and compares the bytes with the input (after
/// translation to the current version).
bool self_check(std::span<const std::uint8_t> bytes, const ContextFactory& factory);

}  // namespace advsim
