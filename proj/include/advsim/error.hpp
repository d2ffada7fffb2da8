#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace advsim {

enum class ErrorKind {
  DuplicateNode,
  DuplicateEdge,
  MissingEndpoint,
  UnknownNode,
  UnknownEdge,
  InvalidNode,
  InvalidEdge,
  InconsistentDocument,
  MalformedXml,
  MissingCoordinate,
  EmptyNetwork,
  InvalidArgument,
  DuplicateSensorName,
  UnknownSensor,
  KindMismatch,
  MissingSensor,
  DuplicateAgentName,
  UnknownAgent,
  ConfigError,
  Terminated,
  RecorderClosed,
  CorruptRecording,
  ConfigMismatch,
  UnsupportedVersion,
  DuplicateArtist,
  PrimitiveOutsideFrame,
  NoClientConnected,
  Timeout,
  NonEmptyGraph,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace advsim
