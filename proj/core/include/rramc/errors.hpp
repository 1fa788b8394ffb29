#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rramc {

// Base class for all errors thrown by this library. Everything derives from
// std::runtime_error so callers that do not care about the fine-grained type
// can still catch and print something useful.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied parameter is out of range or inconsistent.
class InvalidParam : public Error {
public:
  using Error::Error;
};

// A dimension that must be a power of two is not.
class NotPowerOfTwo : public InvalidParam {
public:
  using InvalidParam::InvalidParam;
};

// A read operation would forward-bias an unselected cell beyond the safe bound.
class DisturbViolation : public Error {
public:
  using Error::Error;
};

// A protocol script line could not be parsed or refers to an invalid target.
class ProtocolScriptError : public Error {
public:
  ProtocolScriptError(const std::string& what, std::size_t line_number)
      : Error(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
  std::size_t line;
};

// A subcircuit instance references a definition that does not exist, or the
// instance terminal count disagrees with the definition port count.
class UnresolvedReference : public Error {
public:
  using Error::Error;
};

// A physical coordinate does not sit on the 1 nm manufacturing grid, or is
// too large to be represented in the stream format.
class GridViolation : public Error {
public:
  using Error::Error;
};

// A stream-format record is structurally invalid at the given byte offset.
class MalformedRecord : public Error {
public:
  MalformedRecord(const std::string& what, std::size_t byte_offset)
      : Error(what + " (offset " + std::to_string(byte_offset) + ")"), offset(byte_offset) {}
  std::size_t offset;
};

// A stream-format record type is outside the supported subset.
class UnsupportedRecord : public Error {
public:
  UnsupportedRecord(const std::string& what, std::uint16_t record)
      : Error(what), record_type(record) {}
  std::uint16_t record_type;
};

// A circuit description is empty or degenerate where elements are required.
class EmptyNetwork : public Error {
public:
  using Error::Error;
};

// The system matrix is singular: a node has no DC path to ground.
class SingularNetwork : public Error {
public:
  using Error::Error;
};

// A numerical result came out NaN or infinite.
class NonFiniteValue : public Error {
public:
  using Error::Error;
};

// A waveform never entered and stayed inside the settling band.
class NotSettled : public Error {
public:
  using Error::Error;
};

// Bisection could not bracket or reach the calibration target.
class CalibrationFailed : public Error {
public:
  using Error::Error;
};

// A fit was requested on data that cannot support it.
class DegenerateFit : public Error {
public:
  using Error::Error;
};

// A layout port rectangle touches no conducting shape.
class DisconnectedPort : public Error {
public:
  using Error::Error;
};

// A file could not be read or written.
class IoFailure : public Error {
public:
  using Error::Error;
};

// A configuration file or option set is syntactically or semantically bad.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace rramc
