#pragma once

#include <stdexcept>
#include <string>

namespace nasgnn {

/// Structural problems found while validating a raw cell description.
enum class ValidationIssue {
  NodeLimitExceeded,
  EdgeLimitExceeded,
  CycleDetected,
  BadEndpoints,
  DisconnectedNode,
  UnknownNodeType,
  MalformedEdge,
};

const char* to_string(ValidationIssue issue);

class ValidationError : public std::runtime_error {
 public:
  ValidationError(ValidationIssue issue, const std::string& detail)
      : std::runtime_error(std::string(to_string(issue)) + ": " + detail),
        issue_(issue) {}

  ValidationIssue issue() const { return issue_; }

 private:
  ValidationIssue issue_;
};

class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

class NotScalarError : public std::runtime_error {
 public:
  explicit NotScalarError(const std::string& msg) : std::runtime_error(msg) {}
};

class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(const std::string& msg) : std::runtime_error(msg) {}
};

class BadConfigError : public std::runtime_error {
 public:
  explicit BadConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Line-tagged failure while reading a JSONL dataset file.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateGraphError : public std::runtime_error {
 public:
  explicit DuplicateGraphError(const std::string& msg)
      : std::runtime_error(msg) {}
};

class ExhaustedSpaceError : public std::runtime_error {
 public:
  explicit ExhaustedSpaceError(const std::string& msg)
      : std::runtime_error(msg) {}
};

class MissingLabelError : public std::runtime_error {
 public:
  explicit MissingLabelError(const std::string& msg)
      : std::runtime_error(msg) {}
};

class EmptyPartitionError : public std::runtime_error {
 public:
  explicit EmptyPartitionError(const std::string& msg)
      : std::runtime_error(msg) {}
};

class DimensionMismatchError : public std::runtime_error {
 public:
  explicit DimensionMismatchError(const std::string& msg)
      : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nasgnn
