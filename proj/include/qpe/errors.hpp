#pragma once

#include <stdexcept>
#include <string>

namespace qpe {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// W00 / X00 requested, or family/index outside the basis.
struct ForbiddenIndex : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Li_1 / Phi(.,1,.) at alpha = 0 mod 2pi.
struct QuasiMomentumSingular : std::domain_error {
    using std::domain_error::domain_error;
};

struct GeometryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QuadratureDegreeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularMatrixError : std::runtime_error {
    SingularMatrixError(const std::string& what, double rcond_estimate)
        : std::runtime_error(what), rcond(rcond_estimate) {}
    double rcond;
};

}  // namespace qpe
