#pragma once

#include <stdexcept>
#include <string>

namespace latsch {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DisconnectedDomain : Error {
    using Error::Error;
};
struct WindowTooSmall : Error {
    using Error::Error;
};
struct NonRealPotential : Error {
    using Error::Error;
};
struct NotBoundarySite : Error {
    using Error::Error;
};
struct MissingRobinCoefficient : Error {
    using Error::Error;
};
struct ConeConditionViolated : Error {
    using Error::Error;
};
struct ConvergenceFailure : Error {
    using Error::Error;
};
struct UsageError : Error {
    using Error::Error;
};

}  // namespace latsch
