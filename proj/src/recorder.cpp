#include "advsim/recorder.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstring>

#include "advsim/error.hpp"

namespace advsim {

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned int size = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &size, EVP_sha256(), nullptr) != 1 || size != out.size()) {
    throw Error(ErrorKind::Io, "sha256 failed");
  }
  return out;
}

Digest sha256(std::string_view text) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

namespace rec {

namespace {

class Writer {
 public:
  explicit Writer(Bytes& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void raw(std::span<const std::uint8_t> s) { out_.insert(out_.end(), s.begin(), s.end()); }

 private:
  void le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  bool done() const { return pos_ == in_.size(); }
  std::size_t position() const { return pos_; }
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorKind::CorruptRecording, "truncated event at byte " + std::to_string(pos_));
  }
  std::uint64_t le(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void check_version(std::uint16_t version) {
  if (version < kOldestVersion || version > kCurrentVersion) {
    throw Error(ErrorKind::UnsupportedVersion, "recording format version " + std::to_string(version));
  }
}

std::size_t node_width(std::uint16_t version) { return version == 1 ? 4 : 8; }
std::size_t key_width(std::uint16_t version) { return version <= 2 ? 1 : 2; }

void write_node(Writer& w, NodeId id, std::uint16_t version) {
  if (version == 1) {
    if (raw(id) > UINT32_MAX) throw Error(ErrorKind::InvalidArgument, "node id exceeds v1 range");
    w.u32(static_cast<std::uint32_t>(raw(id)));
  } else {
    w.u64(raw(id));
  }
}

NodeId read_node(Reader& r, std::uint16_t version) { return NodeId{version == 1 ? r.u32() : r.u64()}; }

Event decode_event(Reader& r, std::uint16_t version) {
  const auto tag = r.u8();
  switch (static_cast<Tag>(tag)) {
    case Tag::TurnBegin: return TurnBegin{r.u32()};
    case Tag::AgentMoved: {
      AgentMoved e;
      e.agent = r.u16();
      e.from = read_node(r, version);
      e.to = read_node(r, version);
      return e;
    }
    case Tag::AerialMoved: {
      AerialMoved e;
      e.agent = r.u16();
      e.x = r.f64();
      e.y = r.f64();
      return e;
    }
    case Tag::AgentReset: {
      AgentReset e;
      e.agent = r.u16();
      e.to = read_node(r, version);
      return e;
    }
    case Tag::Custom: {
      Custom e;
      const std::size_t key_len = key_width(version) == 1 ? r.u8() : r.u16();
      e.key = r.str(key_len);
      e.payload = r.str(r.u32());
      return e;
    }
    case Tag::Terminated: return Terminated{r.u32()};
  }
  throw Error(ErrorKind::CorruptRecording, "unknown event tag " + std::to_string(tag));
}

Header decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize + kTrailerSize) throw Error(ErrorKind::CorruptRecording, "recording too short");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw Error(ErrorKind::CorruptRecording, "bad magic");
  Reader r(bytes.subspan(4, kHeaderSize - 4));
  Header h;
  h.version = r.u16();
  h.seed = r.u64();
  std::copy_n(bytes.begin() + 14, 32, h.config_digest.begin());
  return h;
}

Recording decode_versioned(std::span<const std::uint8_t> bytes) {
  Recording out;
  out.header = decode_header(bytes);
  const auto body = bytes.first(bytes.size() - kTrailerSize);
  const Digest trailer = sha256(body);
  if (!std::equal(trailer.begin(), trailer.end(), bytes.end() - kTrailerSize)) {
    throw Error(ErrorKind::CorruptRecording, "trailer hash mismatch");
  }
  check_version(out.header.version);
  Reader r(body.subspan(kHeaderSize));
  while (!r.done()) out.events.push_back(decode_event(r, out.header.version));
  return out;
}

}  // namespace

std::size_t Recording::turn_count() const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [](const Event& e) { return std::holds_alternative<TurnBegin>(e); }));
}

std::size_t encoded_size(const Event& event, std::uint16_t version) {
  check_version(version);
  const std::size_t node = node_width(version);
  return std::visit(
      [&](const auto& e) -> std::size_t {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, TurnBegin> || std::is_same_v<T, Terminated>) return 1 + 4;
        if constexpr (std::is_same_v<T, AgentMoved>) return 1 + 2 + 2 * node;
        if constexpr (std::is_same_v<T, AerialMoved>) return 1 + 2 + 8 + 8;
        if constexpr (std::is_same_v<T, AgentReset>) return 1 + 2 + node;
        if constexpr (std::is_same_v<T, Custom>) return 1 + key_width(version) + e.key.size() + 4 + e.payload.size();
      },
      event);
}

void encode_event(const Event& event, std::uint16_t version, Bytes& out) {
  check_version(version);
  Writer w(out);
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, TurnBegin>) {
          w.u8(static_cast<std::uint8_t>(Tag::TurnBegin));
          w.u32(e.turn);
        } else if constexpr (std::is_same_v<T, AgentMoved>) {
          w.u8(static_cast<std::uint8_t>(Tag::AgentMoved));
          w.u16(e.agent);
          write_node(w, e.from, version);
          write_node(w, e.to, version);
        } else if constexpr (std::is_same_v<T, AerialMoved>) {
          w.u8(static_cast<std::uint8_t>(Tag::AerialMoved));
          w.u16(e.agent);
          w.f64(e.x);
          w.f64(e.y);
        } else if constexpr (std::is_same_v<T, AgentReset>) {
          w.u8(static_cast<std::uint8_t>(Tag::AgentReset));
          w.u16(e.agent);
          write_node(w, e.to, version);
        } else if constexpr (std::is_same_v<T, Custom>) {
          const std::size_t limit = key_width(version) == 1 ? 0xff : 0xffff;
          if (e.key.size() > limit) throw Error(ErrorKind::InvalidArgument, "custom event key too long");
          if (e.payload.size() > UINT32_MAX) throw Error(ErrorKind::InvalidArgument, "custom payload too long");
          w.u8(static_cast<std::uint8_t>(Tag::Custom));
          if (key_width(version) == 1) {
            w.u8(static_cast<std::uint8_t>(e.key.size()));
          } else {
            w.u16(static_cast<std::uint16_t>(e.key.size()));
          }
          w.raw(e.key);
          w.u32(static_cast<std::uint32_t>(e.payload.size()));
          w.raw(e.payload);
        } else {
          w.u8(static_cast<std::uint8_t>(Tag::Terminated));
          w.u32(e.turn);
        }
      },
      event);
}

namespace {

void encode_header(const Header& header, Bytes& out) {
  Writer w(out);
  w.raw(std::span<const std::uint8_t>(kMagic));
  w.u16(header.version);
  w.u64(header.seed);
  w.raw(std::span<const std::uint8_t>(header.config_digest));
}

void append_trailer(Bytes& out) {
  const Digest trailer = sha256(out);
  out.insert(out.end(), trailer.begin(), trailer.end());
}

}  // namespace

Bytes encode_recording(const Recording& recording) {
  check_version(recording.header.version);
  Bytes out;
  encode_header(recording.header, out);
  for (const Event& e : recording.events) encode_event(e, recording.header.version, out);
  append_trailer(out);
  return out;
}

Recording decode_recording(std::span<const std::uint8_t> bytes) { return decode_versioned(bytes); }

std::uint16_t peek_version(std::span<const std::uint8_t> bytes) { return decode_header(bytes).version; }

Bytes translate(std::span<const std::uint8_t> bytes, std::uint16_t from_version, std::uint16_t to_version) {
  check_version(from_version);
  check_version(to_version);
  if (to_version < from_version) {
    throw Error(ErrorKind::UnsupportedVersion,
                "no translator from v" + std::to_string(from_version) + " to v" + std::to_string(to_version));
  }
  const Header header = decode_header(bytes);
  if (header.version != from_version) {
    throw Error(ErrorKind::UnsupportedVersion, "recording is v" + std::to_string(header.version) + ", expected v" +
                                                   std::to_string(from_version));
  }
  if (from_version == to_version) {
    decode_versioned(bytes);
    return Bytes(bytes.begin(), bytes.end());
  }
  Bytes current(bytes.begin(), bytes.end());
  for (std::uint16_t v = from_version; v < to_version; ++v) {
    // One step: decode under v, re-encode under v + 1.
    Recording step = decode_versioned(current);
    step.header.version = static_cast<std::uint16_t>(v + 1);
    current = encode_recording(step);
  }
  return current;
}

void Recorder::open(const Header& header, Mode mode) {
  check_version(header.version);
  header_ = header;
  mode_ = mode;
  buffer_.clear();
  encode_header(header_, buffer_);
  bytes_written_ = buffer_.size();
  if (mode_ == Mode::CountOnly) buffer_.clear();
  events_ = 0;
  turn_events_ = 0;
  peak_turn_events_ = 0;
  open_ = true;
  finalized_ = false;
}

void Recorder::record(const Event& event) {
  if (!open_) throw Error(ErrorKind::RecorderClosed, "record on a closed recorder");
  if (mode_ == Mode::Buffer) {
    encode_event(event, header_.version, buffer_);
  }
  bytes_written_ += encoded_size(event, header_.version);
  ++events_;
  if (std::holds_alternative<TurnBegin>(event)) {
    turn_events_ = 0;
  } else {
    peak_turn_events_ = std::max(peak_turn_events_, ++turn_events_);
  }
}

Bytes Recorder::finalize() {
  if (!open_) throw Error(ErrorKind::RecorderClosed, finalized_ ? "already finalized" : "recorder never opened");
  open_ = false;
  finalized_ = true;
  bytes_written_ += kTrailerSize;
  if (mode_ == Mode::CountOnly) return {};
  append_trailer(buffer_);
  return std::move(buffer_);
}

}  // namespace rec
}  // namespace advsim
