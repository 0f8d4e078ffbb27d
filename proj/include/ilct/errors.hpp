#pragma once

#include <stdexcept>
#include <string>

namespace ilct {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
  public:
    using Error::Error;
};

// A denominator vanishes at the requested evaluation point.
class PoleError : public Error {
  public:
    PoleError(int row, int col, const std::string& what)
        : Error(what), row_(row), col_(col) {}
    int row() const { return row_; }
    int col() const { return col_; }

  private:
    int row_;
    int col_;
};

class SingularError : public Error {
  public:
    using Error::Error;
};

class ProperError : public Error {
  public:
    using Error::Error;
};

// One of the standing plant conditions (C1..C4) or a gain condition failed.
class ConditionError : public Error {
  public:
    ConditionError(std::string condition, const std::string& what)
        : Error(condition + ": " + what), condition_(std::move(condition)) {}
    const std::string& condition() const { return condition_; }

  private:
    std::string condition_;
};

class NonRationalError : public Error {
  public:
    using Error::Error;
};

class NotTrackableError : public Error {
  public:
    using Error::Error;
};

class RealizationError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line = 0) : Error(what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

}  // namespace ilct
