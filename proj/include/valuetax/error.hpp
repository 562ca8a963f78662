#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace valuetax {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTaxonomy : public Error {
 public:
  using Error::Error;
};

/// Authoring error raised while building a taxonomy (duplicate node id or edge).
class DuplicateEntry : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(std::string node)
      : Error("unknown node '" + node + "'"), node_(std::move(node)) {}
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

class ImportanceOutOfRange : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class InvalidContext : public Error {
 public:
  using Error::Error;
};

class MissingEvaluator : public Error {
 public:
  explicit MissingEvaluator(std::string property)
      : Error("no evaluator registered for property '" + property + "'"),
        property_(std::move(property)) {}
  const std::string& property() const noexcept { return property_; }

 private:
  std::string property_;
};

// alignment

class NoPropertyNodes : public Error {
 public:
  NoPropertyNodes() : Error("taxonomy has no property nodes") {}
};

class MissingImportance : public Error {
 public:
  explicit MissingImportance(std::string node)
      : Error("property node '" + node + "' has no importance"), node_(std::move(node)) {}
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

class MissingSatisfaction : public Error {
 public:
  explicit MissingSatisfaction(std::string node)
      : Error("no satisfaction degree for property node '" + node + "'"),
        node_(std::move(node)) {}
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

// mutual-aid domain

class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

class EmptyDistribution : public Error {
 public:
  using Error::Error;
};

class SupportMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class MalformedEvent : public Error {
 public:
  MalformedEvent(std::size_t index, const std::string& what)
      : Error("malformed event at " + std::to_string(index) + ": " + what), index_(index) {}
  /// Zero-based position in the event sequence, or one-based line for parsed logs.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// io

class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& what)
      : Error(location + ": " + what), location_(std::move(location)) {}
  /// "line N" for syntax errors, a JSON pointer (e.g. "/nodes/3/importance") for field errors.
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

class SchemaVersionUnsupported : public Error {
 public:
  explicit SchemaVersionUnsupported(long long version)
      : Error("unsupported schema_version " + std::to_string(version)), version_(version) {}
  long long version() const noexcept { return version_; }

 private:
  long long version_;
};

}  // namespace valuetax
