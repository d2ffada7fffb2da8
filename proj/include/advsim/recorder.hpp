#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "advsim/graph.hpp"

namespace advsim {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> data);

namespace rec {

inline constexpr std::array<std::uint8_t, 4> kMagic{'G', 'M', 'A', 'R'};
inline constexpr std::uint16_t kCurrentVersion = 3;
inline constexpr std::uint16_t kOldestVersion = 1;
inline constexpr std::size_t kHeaderSize = 4 + 2 + 8 + 32;
inline constexpr std::size_t kTrailerSize = 32;

struct TurnBegin {
  std::uint32_t turn = 0;
  friend bool operator==(const TurnBegin&, const TurnBegin&) = default;
};
struct AgentMoved {
  std::uint16_t agent = 0;
  NodeId from{};
  NodeId to{};
  friend bool operator==(const AgentMoved&, const AgentMoved&) = default;
};
struct AerialMoved {
  std::uint16_t agent = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const AerialMoved&, const AerialMoved&) = default;
};
struct AgentReset {
  std::uint16_t agent = 0;
  NodeId to{};
  friend bool operator==(const AgentReset&, const AgentReset&) = default;
};
struct Custom {
  std::string key;
  std::string payload;
  friend bool operator==(const Custom&, const Custom&) = default;
};
struct Terminated {
  std::uint32_t turn = 0;
  friend bool operator==(const Terminated&, const Terminated&) = default;
};

using Event = std::variant<TurnBegin, AgentMoved, AerialMoved, AgentReset, Custom, Terminated>;

enum class Tag : std::uint8_t {
  TurnBegin = 1,
  AgentMoved = 2,
  AerialMoved = 3,
  AgentReset = 4,
  Custom = 5,
  Terminated = 6,
};

struct Header {
  std::uint16_t version = kCurrentVersion;
  std::uint64_t seed = 0;
  Digest config_digest{};
  friend bool operator==(const Header&, const Header&) = default;
};

struct Recording {
  Header header;
  std::vector<Event> events;
  std::size_t turn_count() const;
};

/// Size in bytes of one encoded event under the given format version.
std::size_t encoded_size(const Event& event, std::uint16_t version = kCurrentVersion);

/// Appends one event. Layout per version:
///   v1: node ids u32, custom key length u8
///   v2: node ids u64, custom key length u8
///   v3: node ids u64, custom key length u16
/// All integers little-endian; doubles as IEEE-754 bit patterns.
void encode_event(const Event& event, std::uint16_t version, Bytes& out);

/// Header + events + SHA-256 trailer.
Bytes encode_recording(const Recording& recording);

/// Decodes a recording of any known version, verifying magic and trailer.
Recording decode_recording(std::span<const std::uint8_t> bytes);

std::uint16_t peek_version(std::span<const std::uint8_t> bytes);

/// Rewrites a recording from one format version to a newer one by chaining
/// single-step translators. Same-version translation returns the input.
Bytes translate(std::span<const std::uint8_t> bytes, std::uint16_t from_version, std::uint16_t to_version);

/// Appends events to an in-memory stream. CountOnly mode tracks sizes and
/// counts without retaining bytes.
class Recorder {
 public:
  enum class Mode { Buffer, CountOnly };

  Recorder() = default;

  void open(const Header& header, Mode mode = Mode::Buffer);
  bool is_open() const { return open_; }
  Mode mode() const { return mode_; }

  void record(const Event& event);

  /// Closes the recorder and returns header + events + trailer.
  Bytes finalize();

  const Header& header() const { return header_; }
  std::uint64_t event_count() const { return events_; }
  /// Header plus events so far; includes the trailer once finalized.
  std::uint64_t byte_count() const { return bytes_written_; }
  /// Largest number of events recorded between two TurnBegin markers.
  std::uint64_t peak_turn_events() const { return peak_turn_events_; }

 private:
  bool open_ = false;
  bool finalized_ = false;
  Mode mode_ = Mode::Buffer;
  Header header_;
  Bytes buffer_;
  std::uint64_t events_ = 0;
  std::uint64_t bytes_written_ = 0;
  std::uint64_t turn_events_ = 0;
  std::uint64_t peak_turn_events_ = 0;
};

}  // namespace rec
}  // namespace advsim
