#pragma once

#include <stdexcept>
#include <string>

namespace sharpfront {

/// Base of every error raised by the library. `code()` is a stable
/// machine-readable identifier used in CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define SHARPFRONT_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  }

SHARPFRONT_DEFINE_ERROR(InvalidArgument);
SHARPFRONT_DEFINE_ERROR(NoPositiveEquilibrium);
SHARPFRONT_DEFINE_ERROR(InvalidRegime);
SHARPFRONT_DEFINE_ERROR(NoConvergence);
SHARPFRONT_DEFINE_ERROR(SegmentDiesOut);
SHARPFRONT_DEFINE_ERROR(NoPositiveRoot);
SHARPFRONT_DEFINE_ERROR(DomainError);
SHARPFRONT_DEFINE_ERROR(StepFailure);
SHARPFRONT_DEFINE_ERROR(InconclusiveHorizon);
SHARPFRONT_DEFINE_ERROR(NotMonotone);
SHARPFRONT_DEFINE_ERROR(BracketNotFound);
SHARPFRONT_DEFINE_ERROR(Inconclusive);
SHARPFRONT_DEFINE_ERROR(NotAdmissible);
SHARPFRONT_DEFINE_ERROR(CurveIncomplete);
SHARPFRONT_DEFINE_ERROR(NotIntegrable);
SHARPFRONT_DEFINE_ERROR(WindowTooSparse);
SHARPFRONT_DEFINE_ERROR(TailTooShort);
SHARPFRONT_DEFINE_ERROR(CFLViolation);
SHARPFRONT_DEFINE_ERROR(BoundaryContamination);
SHARPFRONT_DEFINE_ERROR(TraceTooShort);
SHARPFRONT_DEFINE_ERROR(ConfigError);

#undef SHARPFRONT_DEFINE_ERROR

}  // namespace sharpfront
