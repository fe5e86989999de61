#pragma once

#include <stdexcept>
#include <string>

namespace loopspace {

/// Base class for every failure mode this library reports deliberately.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define LOOPSPACE_DEFINE_ERROR(Name)                                   \
    class Name final : public Error {                                  \
    public:                                                            \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// manifold
LOOPSPACE_DEFINE_ERROR(OutsideTubularNeighbourhood);
LOOPSPACE_DEFINE_ERROR(NotOnManifold);
LOOPSPACE_DEFINE_ERROR(TangencyViolation);
LOOPSPACE_DEFINE_ERROR(PairOutsideV);
LOOPSPACE_DEFINE_ERROR(FiberMismatch);

// loops
LOOPSPACE_DEFINE_ERROR(InvalidLoop);
LOOPSPACE_DEFINE_ERROR(DerivativeUnavailable);
LOOPSPACE_DEFINE_ERROR(InsufficientResolution);
LOOPSPACE_DEFINE_ERROR(CoverIncomplete);
LOOPSPACE_DEFINE_ERROR(OverlapMismatch);
LOOPSPACE_DEFINE_ERROR(DomainViolation);
LOOPSPACE_DEFINE_ERROR(DimensionMismatch);

// smoothing
LOOPSPACE_DEFINE_ERROR(NoCompactness);
LOOPSPACE_DEFINE_ERROR(NoAdmissibleConstants);
LOOPSPACE_DEFINE_ERROR(ResolutionTooCoarse);
LOOPSPACE_DEFINE_ERROR(NotBased);

// atlas
LOOPSPACE_DEFINE_ERROR(GridMismatch);
LOOPSPACE_DEFINE_ERROR(OutsideW12);
LOOPSPACE_DEFINE_ERROR(HolonomyCorrectionFailure);
LOOPSPACE_DEFINE_ERROR(FrameMismatch);
LOOPSPACE_DEFINE_ERROR(PartitionDefect);
LOOPSPACE_DEFINE_ERROR(OdeStepRejected);
LOOPSPACE_DEFINE_ERROR(BasepointOutsideU);
LOOPSPACE_DEFINE_ERROR(DomainExit);

// actions
LOOPSPACE_DEFINE_ERROR(MonotonicityViolation);
LOOPSPACE_DEFINE_ERROR(ZeroProbe);
LOOPSPACE_DEFINE_ERROR(EmptyCorpus);

// experiment driver
LOOPSPACE_DEFINE_ERROR(ConfigError);
LOOPSPACE_DEFINE_ERROR(CheckFailure);

#undef LOOPSPACE_DEFINE_ERROR

} // namespace loopspace
