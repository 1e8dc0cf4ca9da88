#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace skytrack {

/// Broad failure classes. The CLI maps these onto distinct exit codes.
enum class ErrorKind {
  InvalidArgument,  // a value violates a type invariant (degenerate box, bad size)
  Parse,            // malformed input text or config
  Ordering,         // frame indices or timestamps out of order
  NotReady,         // not enough history / measurements yet
  Undefined,        // a metric with a zero denominator
  Alignment,        // truth and predictions do not line up
  Io,
  Runtime,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::int64_t line = 0)
      : Error(ErrorKind::Parse, line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  std::int64_t line() const noexcept { return line_; }

 private:
  std::int64_t line_;
};

class OrderingError : public Error {
 public:
  explicit OrderingError(const std::string& what) : Error(ErrorKind::Ordering, what) {}
};

class NotReady : public Error {
 public:
  explicit NotReady(const std::string& what) : Error(ErrorKind::NotReady, what) {}
};

class UndefinedMetric : public Error {
 public:
  explicit UndefinedMetric(const std::string& what) : Error(ErrorKind::Undefined, what) {}
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what) : Error(ErrorKind::Alignment, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace skytrack
