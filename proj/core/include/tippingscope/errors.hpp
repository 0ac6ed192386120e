#pragma once
#include <stdexcept>
#include <string>

namespace tippingscope {

/// Base class for failures of the numerical procedures themselves (bad
/// brackets, divergence, infeasible geometry, ...).  I/O and command-line
/// problems are deliberately *not* DomainErrors; the CLI maps the three
/// families to distinct exit codes (2 / 1 / 64).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// odeint
struct NonFiniteEvaluation : DomainError { using DomainError::DomainError; };
struct StepUnderflow       : DomainError { using DomainError::DomainError; };
struct OutOfRange          : DomainError { using DomainError::DomainError; };
struct InvalidConfig       : DomainError { using DomainError::DomainError; };

// models
struct InvalidAnchor       : DomainError { using DomainError::DomainError; };
struct InvalidModel        : DomainError { using DomainError::DomainError; };

// poincare
struct WindowTooSmall      : DomainError { using DomainError::DomainError; };
struct Divergence          : DomainError { using DomainError::DomainError; };

// bifurcation
struct BadBracket          : DomainError { using DomainError::DomainError; };
struct NonDecayingKernel   : DomainError { using DomainError::DomainError; };
struct NoBracket           : DomainError { using DomainError::DomainError; };
struct AmbiguousOrder      : DomainError { using DomainError::DomainError; };

// transition
struct UnexpectedRootCount : DomainError { using DomainError::DomainError; };
struct NotConverged        : DomainError { using DomainError::DomainError; };

// shapefit
struct InvalidGeometry     : DomainError { using DomainError::DomainError; };
struct OutOfDomain         : DomainError { using DomainError::DomainError; };
struct RankDeficient       : DomainError { using DomainError::DomainError; };
struct NonPositiveCurrentGeneration : DomainError { using DomainError::DomainError; };

} // namespace tippingscope
