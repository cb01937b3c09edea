#ifndef FFORGE_ERRORS_HPP
#define FFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fforge {

// Precondition violations on otherwise-valid types (wrong trace class, bad range, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A profile factory was asked to build a function violating its audited constraints.
struct ProfileConstraintError : std::runtime_error {
    explicit ProfileConstraintError(const std::string& what) : std::runtime_error(what) {}
};

// Geometry inputs that collapse (zero fiber normalization, vanishing eigenbasis, ...).
struct DegenerateGeometryError : std::runtime_error {
    explicit DegenerateGeometryError(const std::string& what) : std::runtime_error(what) {}
};

// End-mode bookkeeping mismatch in the degeneration models.
struct ParityError : std::runtime_error {
    explicit ParityError(const std::string& what) : std::runtime_error(what) {}
};

// Requested a double gluing for a monodromy that is not conjugate to its inverse.
struct GluingUnavailableError : std::runtime_error {
    explicit GluingUnavailableError(const std::string& what) : std::runtime_error(what) {}
};

// A frame restriction was asked for with a frame smaller than the form degree.
struct FrameMismatchError : std::runtime_error {
    explicit FrameMismatchError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fforge

#endif  // FFORGE_ERRORS_HPP
