#pragma once

#include <stdexcept>
#include <string>

namespace hzl {

// Every failure carries a short kind tag so the CLI can map it to exit codes
// and reports without string matching on messages.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define HZL_ERROR_KIND(Name)                                               \
    struct Name : Error {                                                  \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}       \
    }

HZL_ERROR_KIND(NumericalError);
HZL_ERROR_KIND(PoleOfGamma);
HZL_ERROR_KIND(ParameterPole);
HZL_ERROR_KIND(CutEvaluation);
HZL_ERROR_KIND(DomainError);
HZL_ERROR_KIND(DegeneracyError);
HZL_ERROR_KIND(ProfileError);
HZL_ERROR_KIND(SmoothnessMismatch);
HZL_ERROR_KIND(IndicialResonance);
HZL_ERROR_KIND(RecurrenceBreakdown);
HZL_ERROR_KIND(StepFailure);
HZL_ERROR_KIND(NearSingularConnection);
HZL_ERROR_KIND(PoleDetected);
HZL_ERROR_KIND(ResidualTooLarge);
HZL_ERROR_KIND(SourceError);
HZL_ERROR_KIND(GammaPole);
HZL_ERROR_KIND(FitDivergence);
HZL_ERROR_KIND(GridTooCoarse);
HZL_ERROR_KIND(ExtrapolationDivergence);
HZL_ERROR_KIND(DegenerateData);
HZL_ERROR_KIND(ConfigError);
HZL_ERROR_KIND(CacheCorruption);

#undef HZL_ERROR_KIND

}  // namespace hzl
