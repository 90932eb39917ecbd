#pragma once

#include <stdexcept>
#include <string>

namespace gkdv {

// Base class so the CLI can map failure classes to exit codes in one place.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- nonlinearity ---
struct NegativeBase : Error {
    using Error::Error;
};

// --- soliton profile ---
struct NoSolitaryWave : Error {
    using Error::Error;
};
struct SonicLimit : Error {
    using Error::Error;
};
struct ResidualTooLarge : Error {
    using Error::Error;
};

// --- wave family ---
struct NoSignChange : Error {
    using Error::Error;
};

// --- linearization ---
struct GridMismatch : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct FredholmViolation : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct SingularT : Error {
    using Error::Error;
};

// --- reduced dynamics ---
struct StepSizeUnderflow : Error {
    using Error::Error;
};
struct BlowupDetected : Error {
    double t_estimate;
    BlowupDetected(const std::string& msg, double t_est) : Error(msg), t_estimate(t_est) {}
};
struct NoFixedPoints : Error {
    using Error::Error;
};

// --- evolution / modulation ---
struct CFLViolation : Error {
    using Error::Error;
};
struct SeamContamination : Error {
    using Error::Error;
};
struct NewtonDiverged : Error {
    using Error::Error;
};

}  // namespace gkdv
