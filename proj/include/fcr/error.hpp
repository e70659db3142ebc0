#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fcr {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input data; maps to the "validation" exit code.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what);
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class DuplicateIdError : public ValidationError {
 public:
  DuplicateIdError(std::string kind, std::string id);
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class DanglingReferenceError : public ValidationError {
 public:
  DanglingReferenceError(std::string kind, std::string id);
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class DimensionMismatchError : public ValidationError {
 public:
  DimensionMismatchError(std::size_t expected, std::size_t actual);
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class ZeroNormError : public ValidationError {
 public:
  explicit ZeroNormError(const std::string& id);
};

class EmptyTextError : public ValidationError {
 public:
  explicit EmptyTextError(const std::string& id);
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Network or model-server failure. Never escapes the LLM batch operations.
class TransportError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fcr
