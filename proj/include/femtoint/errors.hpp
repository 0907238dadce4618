#pragma once

#include <stdexcept>
#include <string>

namespace femtoint {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A series, sum, or iteration failed to reach its tolerance within its cap.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical result left its admissible range (e.g. a probability outside [0,1]).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that cannot be used to build a model (zero variance, too few samples, ...).
class degenerate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A request exceeds a configured resource cap (e.g. snapshot count).
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
public:
    config_error(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line)
    {
    }

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace femtoint
