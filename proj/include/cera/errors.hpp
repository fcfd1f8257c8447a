#pragma once

#include <stdexcept>
#include <string>

namespace cera {

/// Broad failure classes; the CLI maps each onto a fixed exit code.
enum class ErrorKind {
  InvalidArgument,  ///< malformed spec, bad range, domain violation
  Capacity,         ///< enumeration or state space larger than the configured cap
  Parse,            ///< unreadable input document
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct InvalidSpec : Error {
  explicit InvalidSpec(const std::string& w) : Error(ErrorKind::InvalidArgument, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::InvalidArgument, w) {}
};
struct NotUniform : Error {
  explicit NotUniform(const std::string& w) : Error(ErrorKind::InvalidArgument, w) {}
};
struct BudgetExceedsTotal : Error {
  explicit BudgetExceedsTotal(const std::string& w) : Error(ErrorKind::InvalidArgument, w) {}
};
struct SizeExceedsCap : Error {
  explicit SizeExceedsCap(const std::string& w) : Error(ErrorKind::Capacity, w) {}
};
struct StateSpaceTooLarge : Error {
  explicit StateSpaceTooLarge(const std::string& w) : Error(ErrorKind::Capacity, w) {}
};
struct EnumerationTooLarge : Error {
  explicit EnumerationTooLarge(const std::string& w) : Error(ErrorKind::Capacity, w) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorKind::Parse, w) {}
};

}  // namespace cera
