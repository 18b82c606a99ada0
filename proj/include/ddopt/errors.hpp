#pragma once

#include <stdexcept>
#include <string>

namespace ddopt {

// Bad inputs: violated preconditions, malformed configs, out-of-domain
// arguments. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failures: singular integrands, exhausted subdivision
// budgets, unbracketable roots. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ddopt
