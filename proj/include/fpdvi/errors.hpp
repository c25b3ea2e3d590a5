#pragma once

// Error taxonomy shared across the toolkit.  Hard contract violations throw;
// soft outcomes (iteration budgets, infeasible searches) are reported through
// status fields on result structs so callers can inspect partial results.

#include <complex>
#include <stdexcept>
#include <string>

namespace fpdvi {

/// Base class for all toolkit exceptions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter outside its admissible range (orders, tolerances, dimensions).
class InvalidOrder : public Error {
public:
    using Error::Error;
};

/// Shapes of coupled objects disagree (matrix blocks, path lengths, ...).
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Two sampled paths do not share the same time grid.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// No evaluation strategy reached the requested accuracy.  Carries the best
/// available estimate together with the error bound it is believed to satisfy.
class NonConvergent : public Error {
public:
    NonConvergent(const std::string& what, std::complex<double> best, double bound)
        : Error(what), best_estimate(best), error_bound(bound) {}
    std::complex<double> best_estimate;
    double error_bound;
};

/// Contour quadrature could not be configured or evaluated.
class ContourFailure : public Error {
public:
    using Error::Error;
};

/// Spectrum of the operator intersects the region swept by the contour.
class SectorViolation : public Error {
public:
    using Error::Error;
};

/// A resolvent factorization hit numerical singularity (rcond below floor).
class SingularResolvent : public Error {
public:
    using Error::Error;
};

/// Constraint set description is inconsistent or projection cannot certify
/// feasibility (cyclic projection stalls above its residual floor).
class InfeasibleSet : public Error {
public:
    using Error::Error;
};

/// Requested variant tag does not exist in the closed catalog.
class UnsupportedVariant : public Error {
public:
    using Error::Error;
};

/// The (constraint set, nonsmooth term) pairing is outside the regime where
/// the composite prox-after-projection step is exact.
class UnsupportedCombination : public Error {
public:
    using Error::Error;
};

/// A monotonicity check failed: either the construction-time sampling probe
/// or the solver's step-size backtracking found the map (numerically) not
/// monotone.
class NonMonotoneDetected : public Error {
public:
    using Error::Error;
};

/// Coercivity probe anchor lies outside the constraint set.
class AnchorNotInK : public Error {
public:
    using Error::Error;
};

/// Requested window is finer than the grid can resolve.
class DeltaBelowResolution : public Error {
public:
    using Error::Error;
};

/// Exponential-weight search exhausted its range without certifying a
/// contraction constant below one.
class NoFeasibleL : public Error {
public:
    using Error::Error;
};

/// Problem file could not be parsed as JSON at all.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Problem file parsed but violated the format contract.  `field` holds the
/// dotted path of the offending entry.
class ValidationError : public Error {
public:
    ValidationError(const std::string& field_path, const std::string& what)
        : Error(field_path + ": " + what), field(field_path) {}
    std::string field;
};

} // namespace fpdvi
