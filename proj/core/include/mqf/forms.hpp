#pragma once

#include <complex>

#include "mqf/quadrature.hpp"
#include "mqf/testfn.hpp"

namespace mqf::forms {

struct MassScale {
    double mu = 1.0;
    MassScale() = default;
    explicit MassScale(double m);
};

struct FormValue {
    std::complex<double> value{};
    double error_estimate = 0.0;
    MassScale mu_used{};
};

struct FormOptions {
    double split = 1.0;  // subtraction split point; the result is split-invariant
    quad::Options quad{};
};

// The regularized indefinite form
//   (g1|g2) = (1/2π) lim_{ε→0} [ ∫_ε^∞ dk/k ĝ1*(k)ĝ2(k) + ln(ε/μ) ĝ1*(0)ĝ2(0) ].
// Implemented in the ε-free subtracted form (derivation: split the integral at
// s, subtract z := ĝ1*(0)ĝ2(0) below s so ∫_ε^s z dk/k cancels the ln ε):
//   (g1|g2) = (1/2π) [ ∫_0^s (h(k)-z)/k dk + ∫_s^∞ h(k)/k dk + z(ln s - ln μ) ],
// with h(k) = ĝ1*(k)ĝ2(k).  Atom inputs use closed-form transforms; group-action
// images integrate the position-space kernel by exact change of variables.
FormValue reg_form(const TestFunction& g1, const TestFunction& g2, MassScale mu,
                   const FormOptions& opts = {});

// W(t) = (1/2π)(-γ_E - ln|μt| + iπ/2 sgn t); domain error at t = 0
std::complex<double> kernel_W(double t, MassScale mu);

// the same form evaluated against the position-space kernel:
//   (g1|g2) = ∫ dt ds g1(t) W(t-s) g2(s)
FormValue reg_form_position(const TestFunction& g1, const TestFunction& g2, MassScale mu,
                            const FormOptions& opts = {});

// Im(g1|g2); convergent without regularization and μ-independent
double imag_form(const TestFunction& g1, const TestFunction& g2, const quad::Options& opts = {});

// fermionic scalar product ∫ g1 g2 dt = ∫ dk/2π ĝ1*(k) ĝ2(k); exact for atoms
double fermi_form(const TestFunction& g1, const TestFunction& g2, const quad::Options& opts = {});

// [φ(p1), φ(p2)] = i 2 Im(g_R1|g_R2) + i 2 Im(g_L1|g_L2); σ- and μ-independent
std::complex<double> commutator_value(const MoverPair& p1, const MoverPair& p2,
                                      const quad::Options& opts = {});

// causal spacetime commutator, evaluated from the light-cone line densities:
//   [φ(f1), φ(f2)] = -(i/2) ∬ f1 f2 [sgn((t1+x1)-(t2+x2)) + sgn((t1-x1)-(t2-x2))]
// (equals commutator_value of the mover pairs; the -1/2 is fixed by that identity)
std::complex<double> commutator_spacetime(const SpacetimeFunction& f1, const SpacetimeFunction& f2,
                                          const quad::Options& opts = {});

}  // namespace mqf::forms
