#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qie {

/// Mismatched grids, malformed parameters, wrong sizes.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Division by zero, sqrt of a negative, or a non-finite result during evaluation.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownIdentifier, IndexOutOfRange };

    ParseError(Kind kind, std::size_t offset, const std::string& what)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), kind_(kind), offset_(offset) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

/// A problem breaks one of the standing hypotheses on kernels, data, operators or g.
class AssumptionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double last_delta, int iterations)
        : std::runtime_error(what), last_delta_(last_delta), iterations_(iterations) {}

    double last_delta() const noexcept { return last_delta_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_delta_;
    int iterations_;
};

/// Something that the proven estimates rule out happened, e.g. an iterate left
/// the ball on a certified problem. Points at a bug or an unsound constant.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace qie
