#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace fedqq {

struct QuadratureError : std::runtime_error {
    double achieved;
    QuadratureError(const std::string& what, double achieved_)
        : std::runtime_error(what), achieved(achieved_) {}
};

/// Adaptive Gauss-Kronrod (7-15) integration of f over [a,b] to absolute
/// tolerance tol. Throws QuadratureError (with the achieved tolerance)
/// if the error estimate cannot be driven below tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

}  // namespace fedqq
