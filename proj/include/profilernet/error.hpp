#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace profilernet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& id)
      : Error("unknown variable '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class BadState : public Error {
 public:
  using Error::Error;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

/// Evidence whose marginal probability under the model is zero.
class ImpossibleEvidence : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. line() is 1-based, 0 when not line-anchored. The
/// message reads "source:line: detail" when a source name is known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail,
             const std::string& source = "")
      : Error(compose(line, detail, source)),
        line_(line),
        detail_(detail) {}
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  static std::string compose(std::size_t line, const std::string& detail,
                             const std::string& source) {
    std::string where = source;
    if (line > 0) {
      where += source.empty() ? "line " : ":";
      where += std::to_string(line);
    }
    return where.empty() ? detail : where + ": " + detail;
  }

  std::size_t line_;
  std::string detail_;
};

}  // namespace profilernet
