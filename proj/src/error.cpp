#include "advsim/error.hpp"

namespace advsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateNode: return "DuplicateNode";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::MissingEndpoint: return "MissingEndpoint";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::UnknownEdge: return "UnknownEdge";
    case ErrorKind::InvalidNode: return "InvalidNode";
    case ErrorKind::InvalidEdge: return "InvalidEdge";
    case ErrorKind::InconsistentDocument: return "InconsistentDocument";
    case ErrorKind::MalformedXml: return "MalformedXml";
    case ErrorKind::MissingCoordinate: return "MissingCoordinate";
    case ErrorKind::EmptyNetwork: return "EmptyNetwork";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DuplicateSensorName: return "DuplicateSensorName";
    case ErrorKind::UnknownSensor: return "UnknownSensor";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::MissingSensor: return "MissingSensor";
    case ErrorKind::DuplicateAgentName: return "DuplicateAgentName";
    case ErrorKind::UnknownAgent: return "UnknownAgent";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::Terminated: return "Terminated";
    case ErrorKind::RecorderClosed: return "RecorderClosed";
    case ErrorKind::CorruptRecording: return "CorruptRecording";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::DuplicateArtist: return "DuplicateArtist";
    case ErrorKind::PrimitiveOutsideFrame: return "PrimitiveOutsideFrame";
    case ErrorKind::NoClientConnected: return "NoClientConnected";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::NonEmptyGraph: return "NonEmptyGraph";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace advsim
