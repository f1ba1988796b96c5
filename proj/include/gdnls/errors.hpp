#pragma once

#include <stdexcept>
#include <string>

namespace gdnls {

// Every failure raised by the library derives from Error so callers can
// catch the family and still dispatch on the concrete type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GDNLS_DEFINE_ERROR(Name)              \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(std::string(#Name ": ") + what) {} \
  }

GDNLS_DEFINE_ERROR(NonFiniteInput);
GDNLS_DEFINE_ERROR(GridMismatch);
GDNLS_DEFINE_ERROR(InvalidArgument);
GDNLS_DEFINE_ERROR(NoConvergence);
GDNLS_DEFINE_ERROR(DomainViolation);
GDNLS_DEFINE_ERROR(TruncationTooSmall);
GDNLS_DEFINE_ERROR(NoSignChange);
GDNLS_DEFINE_ERROR(RootNotUnique);
GDNLS_DEFINE_ERROR(SymmetryViolation);
GDNLS_DEFINE_ERROR(NotDegenerate);
GDNLS_DEFINE_ERROR(Kappa0Mismatch);
GDNLS_DEFINE_ERROR(EigenFailure);
GDNLS_DEFINE_ERROR(BlowupDetected);
GDNLS_DEFINE_ERROR(StepTooLarge);
GDNLS_DEFINE_ERROR(OutsideTube);
GDNLS_DEFINE_ERROR(CutoffTooLarge);
GDNLS_DEFINE_ERROR(InsufficientSampling);
GDNLS_DEFINE_ERROR(ConfigError);

#undef GDNLS_DEFINE_ERROR

}  // namespace gdnls
