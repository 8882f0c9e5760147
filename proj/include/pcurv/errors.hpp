#pragma once

#include <stdexcept>
#include <string>

namespace pcurv {

/// Numerical failures: the inputs were well-formed but a computation could
/// not be completed (marching ran off the curve, a bend degenerated, ...).
/// The CLI maps these to exit code 2; validation errors
/// (std::invalid_argument / std::out_of_range) map to exit code 1.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Equilateral marching could not place the next vertex (the chord equation
/// has no root before the end of the domain).
struct MarchingError : NumericalError {
    using NumericalError::NumericalError;
};

/// Bend construction or p-rotation requested at a turning angle too close
/// to pi, where tan(theta/2) and the bend colatitude degenerate.
struct SingularAngleError : NumericalError {
    using NumericalError::NumericalError;
};

/// A curvature query or integral hit a corner point of the curve.
struct NonSmoothError : NumericalError {
    using NumericalError::NumericalError;
};

/// Arc-length reparametrization found a (numerically) vanishing speed.
struct DegenerateParametrizationError : NumericalError {
    using NumericalError::NumericalError;
};

/// Consecutive inscription samples are antipodal; no unique geodesic edge.
struct InscriptionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The inverse chart was evaluated at (or too close to) the south pole.
struct ChartDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An experiment schedule is unusable (empty, non-monotone, no admissible entry).
struct ScheduleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace pcurv
