#pragma once

#include <stdexcept>
#include <string>

namespace rankdb {

enum class Errc {
  incompatible_chain,
  scheme_mismatch,
  not_joinable,
  not_crisp,
  domain,
  not_included,
  not_equivalent,
  unsupported,
  parse,
  unknown_name,
  invalid_argument,
  overflow,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::incompatible_chain: return "incompatible chain";
    case Errc::scheme_mismatch: return "scheme mismatch";
    case Errc::not_joinable: return "tuples not joinable";
    case Errc::not_crisp: return "table not crisp";
    case Errc::domain: return "domain error";
    case Errc::not_included: return "not ordinally included";
    case Errc::not_equivalent: return "not ordinally equivalent";
    case Errc::unsupported: return "unsupported";
    case Errc::parse: return "parse error";
    case Errc::unknown_name: return "unknown name";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::overflow: return "arithmetic overflow";
  }
  return "error";
}

/// Every failure in the library is reported through this type; `code()`
/// lets callers distinguish the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), message_(what) {}

  Errc code() const noexcept { return code_; }
  /// what() without the category prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

/// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(Errc::parse, "line " + std::to_string(line) + ", column " +
                               std::to_string(column) + ": " + what),
        detail_(what),
        line_(line),
        column_(column) {}

  /// The message without the position prefix.
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace rankdb
