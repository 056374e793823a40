#pragma once

#include <stdexcept>
#include <string>

namespace dampcount {

/// Requested state does not fit in the truncated Fock space.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double tail_mass)
        : std::runtime_error(what), tail_mass_(tail_mass) {}

    double tail_mass() const noexcept { return tail_mass_; }

private:
    double tail_mass_;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ValidationKind { hermiticity, trace, positivity, probability };

inline const char* to_string(ValidationKind kind) {
    switch (kind) {
    case ValidationKind::hermiticity: return "hermiticity";
    case ValidationKind::trace: return "trace";
    case ValidationKind::positivity: return "positivity";
    case ValidationKind::probability: return "probability";
    }
    return "unknown";
}

/// A density-matrix or distribution invariant failed. `defect` is the measured
/// violation (e.g. |Tr rho - 1|, or the most negative eigenvalue).
class ValidationError : public std::runtime_error {
public:
    ValidationError(ValidationKind kind, double defect)
        : std::runtime_error(std::string("validation failed: ") + to_string(kind) +
                             " defect " + std::to_string(defect)),
          kind_(kind),
          defect_(defect) {}

    ValidationKind kind() const noexcept { return kind_; }
    double defect() const noexcept { return defect_; }

private:
    ValidationKind kind_;
    double defect_;
};

}  // namespace dampcount
