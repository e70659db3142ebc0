#include "fcr/error.hpp"

#include <fmt/core.h>

namespace fcr {

ParseError::ParseError(std::string file, std::size_t line, const std::string& what)
    : ValidationError(fmt::format("{}:{}: {}", file, line, what)),
      file_(std::move(file)),
      line_(line) {}

DuplicateIdError::DuplicateIdError(std::string kind, std::string id)
    : ValidationError(fmt::format("duplicate {} id \"{}\"", kind, id)), id_(std::move(id)) {}

DanglingReferenceError::DanglingReferenceError(std::string kind, std::string id)
    : ValidationError(fmt::format("dangling reference to unknown {} \"{}\"", kind, id)),
      id_(std::move(id)) {}

DimensionMismatchError::DimensionMismatchError(std::size_t expected, std::size_t actual)
    : ValidationError(fmt::format("dimension mismatch: expected {}, got {}", expected, actual)),
      expected_(expected),
      actual_(actual) {}

ZeroNormError::ZeroNormError(const std::string& id)
    : ValidationError(fmt::format("vector \"{}\" has zero norm", id)) {}

EmptyTextError::EmptyTextError(const std::string& id)
    : ValidationError(fmt::format("item \"{}\" has no non-empty text field", id)) {}

}  // namespace fcr
