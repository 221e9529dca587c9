#ifndef PJD_ERRORS_HPP
#define PJD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pjd {

/// Base class for all library errors. Everything user-facing derives from
/// this so the CLI can map failures to exit codes in one place.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// A coefficient violates the degree bounds of the generator characterization.
class DegreeViolation : public Error {
public:
    explicit DegreeViolation(const std::string& msg) : Error(msg) {}
};

/// Declared jump moments disagree with the moments implied by the kernel.
class MomentMismatch : public Error {
public:
    explicit MomentMismatch(const std::string& msg) : Error(msg) {}
};

class MissingJumpMoments : public Error {
public:
    explicit MissingJumpMoments(const std::string& msg) : Error(msg) {}
};

class UnsupportedMarkFamily : public Error {
public:
    explicit UnsupportedMarkFamily(const std::string& msg) : Error(msg) {}
};

/// Image of the augmented generator fell outside V_m: the degree conditions
/// of the augmentation are breached.
class ClosureViolation : public Error {
public:
    explicit ClosureViolation(const std::string& msg) : Error(msg) {}
};

class ExponentialMomentFailure : public Error {
public:
    explicit ExponentialMomentFailure(const std::string& msg) : Error(msg) {}
};

class IncompleteSolution : public Error {
public:
    explicit IncompleteSolution(const std::string& msg) : Error(msg) {}
};

class IllConditioned : public Error {
public:
    explicit IllConditioned(const std::string& msg) : Error(msg) {}
};

class NegativeDiffusion : public Error {
public:
    explicit NegativeDiffusion(const std::string& msg) : Error(msg) {}
};

class DegenerateVariance : public Error {
public:
    explicit DegenerateVariance(const std::string& msg) : Error(msg) {}
};

class NonpositivePsi : public Error {
public:
    explicit NonpositivePsi(const std::string& msg) : Error(msg) {}
};

class KernelRequired : public Error {
public:
    explicit KernelRequired(const std::string& msg) : Error(msg) {}
};

class QuadratureDivergence : public Error {
public:
    explicit QuadratureDivergence(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace pjd

#endif
