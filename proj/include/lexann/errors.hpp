#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lexann {

/// Base class for all lexann errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Rejected insertion of a doc_id that is already present in an index.
class DuplicateDocIdError : public Error {
public:
  explicit DuplicateDocIdError(std::uint32_t doc_id)
      : Error("duplicate doc_id " + std::to_string(doc_id)), doc_id_(doc_id) {}

  std::uint32_t doc_id() const noexcept { return doc_id_; }

private:
  std::uint32_t doc_id_;
};

/// Malformed input. Carries the byte offset where parsing stopped and,
/// for line-oriented formats, the 1-based line number (0 if not line-based).
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t byte_offset, std::size_t line = 0)
      : Error(what), byte_offset_(byte_offset), line_(line) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t byte_offset_;
  std::size_t line_;
};

}  // namespace lexann
