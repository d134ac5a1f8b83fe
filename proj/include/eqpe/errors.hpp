#pragma once

#include <stdexcept>
#include <string>

namespace eqpe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IllTyped : Error { using Error::Error; };
struct UnknownSort : Error { using Error::Error; };
struct SignatureError : Error { using Error::Error; };
struct SortViolation : Error { using Error::Error; };
struct InvalidPosition : Error { using Error::Error; };
struct UnsupportedAxioms : Error { using Error::Error; };
struct SolverLimit : Error { using Error::Error; };
struct NonOrientable : Error { using Error::Error; };
struct NonTermination : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct NotClosed : Error { using Error::Error; };
struct UnsupportedFeature : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

struct ParseError : Error {
  ParseError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line(line),
        column(column) {}
  int line;
  int column;
};

}  // namespace eqpe
