#pragma once

#include <stdexcept>
#include <string>

namespace wlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define WLAB_ERROR(Name)                      \
  struct Name : NumericalError {              \
    using NumericalError::NumericalError;     \
  }

WLAB_ERROR(NonPositiveDefinite);
WLAB_ERROR(ChartSingularity);
WLAB_ERROR(FiniteDifferenceStepUnderflow);
WLAB_ERROR(NonConvergentDerivative);
WLAB_ERROR(IntegratorFailure);
WLAB_ERROR(GraphTooLarge);
WLAB_ERROR(KernelComponentPresent);
WLAB_ERROR(StepTooLarge);
WLAB_ERROR(ExpInversionFailure);
WLAB_ERROR(FitIllConditioned);
WLAB_ERROR(NoConvergence);

#undef WLAB_ERROR

}  // namespace wlab
