#pragma once

#include <stdexcept>
#include <string>

namespace cet {

// Argument outside the mathematical domain of a function (sd <= 0, p outside (0,1), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or insufficient input data.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Zero pooled variance; the t statistics are undefined.
class DegenerateDataError : public InputError {
public:
    DegenerateDataError()
        : InputError("degenerate data: pooled standard deviation is zero; "
                     "the t-based procedure is undefined, handle exact data separately") {}
};

// Quadrature or root finding failed to reach the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A sample-size search could not reach its target below the configured cap.
class SearchFailure : public std::runtime_error {
public:
    SearchFailure(const std::string& what, double best_achieved, long best_n)
        : std::runtime_error(what), best_achieved_(best_achieved), best_n_(best_n) {}

    double best_achieved() const noexcept { return best_achieved_; }
    long best_n() const noexcept { return best_n_; }

private:
    double best_achieved_;
    long best_n_;
};

}  // namespace cet
