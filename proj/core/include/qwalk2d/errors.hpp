#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Base class for all library errors. `kind()` is a stable identifier used by
/// callers (and the CLI) to map failures to exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define QWALK_DEFINE_ERROR(NAME)                                               \
    class NAME : public Error {                                                \
    public:                                                                    \
        explicit NAME(const std::string& what) : Error(#NAME, what) {}         \
    }

QWALK_DEFINE_ERROR(NotNormalized);      // row/state norm off by more than 1e-10
QWALK_DEFINE_ERROR(NotUnitDeterminant); // |delta| != 1 beyond 1e-10
QWALK_DEFINE_ERROR(OutOfRange);         // scalar argument outside its domain
QWALK_DEFINE_ERROR(DegenerateCoin);     // some of a,b,c,d vanish
QWALK_DEFINE_ERROR(TooLarge);           // exact/brute-force path beyond its cap
QWALK_DEFINE_ERROR(TooShort);           // series or horizon too short to use
QWALK_DEFINE_ERROR(TooFewPoints);       // fit window has too few samples
QWALK_DEFINE_ERROR(NotHermitian);       // matrix fails the Hermiticity guard
QWALK_DEFINE_ERROR(BadSpectrum);        // eigenvalues not a probability spectrum
QWALK_DEFINE_ERROR(EmptyComponent);     // component carries no probability mass
QWALK_DEFINE_ERROR(NotFactorable);      // density has no Kronecker factorization
QWALK_DEFINE_ERROR(ResourceLimit);      // projected allocation exceeds the cap
QWALK_DEFINE_ERROR(CalibrationFailed);  // no transcription candidate passes
QWALK_DEFINE_ERROR(ConfigError);        // malformed configuration input

#undef QWALK_DEFINE_ERROR

} // namespace qwalk
