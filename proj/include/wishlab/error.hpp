#ifndef WISHLAB_ERROR_HPP
#define WISHLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wishlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define WISHLAB_DECLARE_ERROR(Name)          \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

/// Two coordinates are exactly equal where the drift is singular.
WISHLAB_DECLARE_ERROR(CoincidentCoordinates);
/// A root coordinate x^i is zero where 1/x^i appears.
WISHLAB_DECLARE_ERROR(ZeroCoordinate);
/// Argument outside the domain of the function (wrong size, off the open cone, ...).
WISHLAB_DECLARE_ERROR(DomainError);
WISHLAB_DECLARE_ERROR(BadK);
WISHLAB_DECLARE_ERROR(NumericOverflow);
WISHLAB_DECLARE_ERROR(NoInvariantLaw);
/// Stationary density requested outside gamma > 0, kappa > 0.
WISHLAB_DECLARE_ERROR(NotEvaluable);
/// The requested experiment needs a regime the parameters are not in.
WISHLAB_DECLARE_ERROR(RegimeMismatch);
WISHLAB_DECLARE_ERROR(NumericalFailure);
WISHLAB_DECLARE_ERROR(TooFewSamples);

/// Configuration problem; the message names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

#undef WISHLAB_DECLARE_ERROR

}  // namespace wishlab

#endif  // WISHLAB_ERROR_HPP
