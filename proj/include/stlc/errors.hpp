#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stlc {

/// Base of every error raised by the toolkit. `kind()` is the stable name
/// used in reports and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define STLC_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

STLC_DEFINE_ERROR(InvalidArgument)
STLC_DEFINE_ERROR(SphereViolation)
STLC_DEFINE_ERROR(DecayViolation)
STLC_DEFINE_ERROR(HypothesisViolation)
STLC_DEFINE_ERROR(OrderOutOfRange)
STLC_DEFINE_ERROR(PhaseResolutionExceeded)
STLC_DEFINE_ERROR(BadMargin)
STLC_DEFINE_ERROR(UnsupportedIndexRange)
STLC_DEFINE_ERROR(NoContraction)
STLC_DEFINE_ERROR(SingularGram)
STLC_DEFINE_ERROR(GridTooCoarse)
STLC_DEFINE_ERROR(TangencyViolation)
STLC_DEFINE_ERROR(SupportViolation)
STLC_DEFINE_ERROR(ConfigError)

#undef STLC_DEFINE_ERROR

/// Fixed-point synthesis failed; carries the residual history so callers
/// can decide whether to shrink the neighbourhood radius.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, std::vector<double> history)
      : Error("NoConvergence", what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace stlc
