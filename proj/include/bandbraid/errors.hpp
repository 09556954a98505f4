#pragma once

#include <stdexcept>
#include <string>

namespace bandbraid {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define BANDBRAID_DEFINE_ERROR(Name)        \
  class Name : public Error {               \
  public:                                   \
    using Error::Error;                     \
  }

BANDBRAID_DEFINE_ERROR(ValidationError);
BANDBRAID_DEFINE_ERROR(PreconditionViolated);
BANDBRAID_DEFINE_ERROR(GenericityFailure);
BANDBRAID_DEFINE_ERROR(NonConvergence);
BANDBRAID_DEFINE_ERROR(TangencyDetected);
BANDBRAID_DEFINE_ERROR(ConstructionFailure);
BANDBRAID_DEFINE_ERROR(ZeroFiber);
BANDBRAID_DEFINE_ERROR(DoublePointOnLoop);
BANDBRAID_DEFINE_ERROR(TripleCoincidenceOnLoop);
BANDBRAID_DEFINE_ERROR(LiftAmbiguity);
BANDBRAID_DEFINE_ERROR(BlockStructureFailure);
BANDBRAID_DEFINE_ERROR(TemplateMismatch);
BANDBRAID_DEFINE_ERROR(StrandMismatch);
BANDBRAID_DEFINE_ERROR(NotAKnot);
BANDBRAID_DEFINE_ERROR(NonUnitRemainder);
BANDBRAID_DEFINE_ERROR(MissingData);

#undef BANDBRAID_DEFINE_ERROR

/// Config text could not be tokenized; carries a 1-based line and column.
class ParseError : public Error {
public:
  ParseError(int line, int column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

}  // namespace bandbraid
