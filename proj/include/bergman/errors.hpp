#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

/// Invalid domain description, or a point that is not a member where one is required.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A geometric scale that is not representable in binary64.
class ScaleUnderflow : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DegenerateAnnulus : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Gram matrix stayed indefinite after the last jitter step.
class IllConditionedBasis : public std::runtime_error {
public:
    IllConditionedBasis(const std::string& what, double min_eig, double max_eig, double jitter)
        : std::runtime_error(what), min_eigenvalue(min_eig), max_eigenvalue(max_eig), last_jitter(jitter) {}
    double min_eigenvalue;
    double max_eigenvalue;
    double last_jitter;
};

/// Configuration rejected; `field` is a JSON pointer to the offending entry.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field_path, const std::string& message)
        : std::invalid_argument(field_path + ": " + message), field(std::move(field_path)) {}
    std::string field;
};

}  // namespace bergman
