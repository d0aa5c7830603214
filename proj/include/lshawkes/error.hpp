#pragma once

#include <stdexcept>
#include <string>

namespace lshawkes {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidModel : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Estimator requested at a point whose kernel supports leave [0, 1].
class InfeasibleEstimate : public Error {
public:
    using Error::Error;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

// Thinning produced more events than SimulationConfig::max_events.
class ExplosionGuard : public Error {
public:
    using Error::Error;
};

class InadmissiblePlan : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace lshawkes
