#pragma once

#include <stdexcept>
#include <string>

namespace semiflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    /// Short machine-readable tag, e.g. "DomainError".
    virtual const char* kind() const noexcept { return "Error"; }
};

#define SEMIFLOW_DEFINE_ERROR(Name)                                      \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(what) {}          \
        const char* kind() const noexcept override { return #Name; }     \
    };

SEMIFLOW_DEFINE_ERROR(DomainError)        // point outside the open disc
SEMIFLOW_DEFINE_ERROR(SingularityError)   // point inside a declared guard, or non-finite value
SEMIFLOW_DEFINE_ERROR(InvalidArgument)
SEMIFLOW_DEFINE_ERROR(EscapeError)        // integrated orbit reached the unit circle
SEMIFLOW_DEFINE_ERROR(InverseError)       // conformal inverse failed to converge
SEMIFLOW_DEFINE_ERROR(ModelError)
SEMIFLOW_DEFINE_ERROR(NoConvergence)
SEMIFLOW_DEFINE_ERROR(QuadratureError)
SEMIFLOW_DEFINE_ERROR(MultiplicityError)
SEMIFLOW_DEFINE_ERROR(HypothesisError)
SEMIFLOW_DEFINE_ERROR(CaseMismatch)
SEMIFLOW_DEFINE_ERROR(DepthExceeded)
SEMIFLOW_DEFINE_ERROR(InterpolationError)
SEMIFLOW_DEFINE_ERROR(BisectionError)
SEMIFLOW_DEFINE_ERROR(ConfigError)

#undef SEMIFLOW_DEFINE_ERROR

}  // namespace semiflow
