#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mqf::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_panels = 6000;
    std::vector<double> breakpoints{};  // interior points the panels must not straddle
    bool throw_on_failure = true;
};

struct Result {
    std::complex<double> value{};
    double error = 0.0;  // accumulated error estimate (plus any tail bound added by callers)
    int panels = 0;
};

class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(double achieved_, double requested_)
        : std::runtime_error("quadrature tolerance not reached: achieved " +
                             std::to_string(achieved_) + ", requested " + std::to_string(requested_)),
          achieved(achieved_),
          requested(requested_) {}
    double achieved;
    double requested;
};

using Integrand = std::function<std::complex<double>(double)>;

// single Gauss-Kronrod 15(7) panel
Result gk15(const Integrand& f, double a, double b);

// adaptive integration on [a,b]; infinite endpoints are mapped rationally
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

// integral over the whole real line via a tan substitution; the integrand must
// decay at least like 1/t^2 for the mapped endpoints to stay finite
Result integrate_line(const Integrand& f, const Options& opts = {});

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      const Options& opts = {});

}  // namespace mqf::quad
