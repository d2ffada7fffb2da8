#include "advsim/replay.hpp"

#include "advsim/error.hpp"
#include "advsim/log.hpp"

namespace advsim {

namespace {

Bytes current_version(std::span<const std::uint8_t> bytes) {
  const std::uint16_t version = rec::peek_version(bytes);
  if (version == rec::kCurrentVersion) return Bytes(bytes.begin(), bytes.end());
  log().info("translating recording from version {} to {}", version, rec::kCurrentVersion);
  return rec::translate(bytes, version, rec::kCurrentVersion);
}

}  // namespace

std::unique_ptr<Context> replay(std::span<const std::uint8_t> bytes, const ContextFactory& factory,
                                const TurnCallback& on_turn) {
  const Bytes translated = current_version(bytes);
  const rec::Recording recording = rec::decode_recording(translated);

  std::unique_ptr<Context> ctx = factory();
  if (ctx->seed() != recording.header.seed) {
    throw Error(ErrorKind::ConfigMismatch, "recording seed " + std::to_string(recording.header.seed) +
                                               " differs from scenario seed " + std::to_string(ctx->seed()));
  }
  if (ctx->config_digest() != recording.header.config_digest) {
    throw Error(ErrorKind::ConfigMismatch, "recording was made with a different scenario configuration");
  }

  bool in_turn = false;
  for (const rec::Event& event : recording.events) {
    if (in_turn && std::holds_alternative<rec::TurnBegin>(event) && on_turn) on_turn(*ctx, ctx->turn());
    ctx->apply(event);
    in_turn = in_turn || std::holds_alternative<rec::TurnBegin>(event);
  }
  if (in_turn && on_turn) on_turn(*ctx, ctx->turn());
  return ctx;
}

bool self_check(std::span<const std::uint8_t> bytes, const ContextFactory& factory) {
  const Bytes translated = current_version(bytes);
  std::unique_ptr<Context> ctx = replay(translated, factory);
  return ctx->finish_recording() == translated;
}

}  // namespace advsim
