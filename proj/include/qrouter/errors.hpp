#pragma once

#include <stdexcept>
#include <string>

namespace qrouter {

// Base for all library errors; what() carries a human-readable reason.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// linalg
struct NonHermitianInput : Error { using Error::Error; };
struct NegativeSpectrum : Error { using Error::Error; };

// propagation
struct PhysicalityViolation : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };

// analytic scattering
struct DegenerateDenominator : Error { using Error::Error; };
struct ZeroFlux : Error { using Error::Error; };

// metrics
struct NegativeFlux : Error { using Error::Error; };
struct InsufficientSupport : Error { using Error::Error; };

// herald
struct ZeroProbabilityBranch : Error { using Error::Error; };

// configuration / CLI
struct ConfigError : Error { using Error::Error; };

}  // namespace qrouter
