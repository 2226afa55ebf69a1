#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FRACOPT_ERROR(Name)                 \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

FRACOPT_ERROR(IterationLimitExceeded);
FRACOPT_ERROR(OracleContractViolation);
FRACOPT_ERROR(PreconditionViolation);
FRACOPT_ERROR(ContractViolation);
FRACOPT_ERROR(DomainViolation);
FRACOPT_ERROR(NoRootUnexpected);
FRACOPT_ERROR(EmptyDomain);
FRACOPT_ERROR(MalformedWalk);
FRACOPT_ERROR(NotACycle);
FRACOPT_ERROR(GroundSetTooLarge);
FRACOPT_ERROR(InfeasibleTrivialRow);

#undef FRACOPT_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace fracopt
