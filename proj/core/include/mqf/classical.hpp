#pragma once

#include <utility>
#include <vector>

#include "mqf/quadrature.hpp"
#include "mqf/testfn.hpp"

namespace mqf::classical {

// Element of ∂₀⁻¹S: a Schwartz part plus smooth centered steps with exact
// asymptote bookkeeping.  value(t) = fast(t) + Σ c_j (Φ((t-c_j)/w_j) - ½),
// so the asymptotes are ±Σc_j/2 and the derivative is again a pure atom sum.
class AsymptoticFunction {
  public:
    struct Step {
        double center = 0.0, width = 1.0, coeff = 0.0;
    };

    AsymptoticFunction() = default;
    static AsymptoticFunction from_schwartz(TestFunction fast);
    static AsymptoticFunction step(double center = 0.0, double width = 1.0, double amplitude = 1.0);

    double operator()(double t) const;
    double asymptote() const;  // value at +∞ (= -value at -∞)
    TestFunction derivative() const;
    AsymptoticFunction reflected() const;  // t -> -t
    AsymptoticFunction operator+(const AsymptoticFunction& o) const;
    AsymptoticFunction operator*(double s) const;

    const TestFunction& fast() const { return fast_; }
    const std::vector<Step>& steps() const { return steps_; }

  private:
    TestFunction fast_{};
    std::vector<Step> steps_{};
    friend AsymptoticFunction cumulative_centered(const TestFunction& g);
};

// φ(t) = ∫_{-∞}^t g - ĝ(0)/2 (closed form for atoms): the centered primitive
// with odd asymptotes ±ĝ(0)/2
AsymptoticFunction cumulative_centered(const TestFunction& g);

enum class SpaceClass { F00, F10, F01, F11 };

// Solution of the 1+1d wave equation, normatively parametrized by the
// derivatives of its right and left movers (g_R, g_L).
class ClassicalSolution {
  public:
    ClassicalSolution() = default;
    static ClassicalSolution from_movers_derivatives(TestFunction g_right, TestFunction g_left);
    // initial data at t = 0: f0 = φ(0,·) ∈ ∂₀⁻¹S, f1 = ∂_t φ(0,·) ∈ S;
    //   g_R(t) = -½f₀'(-t) + ½f₁(-t),  g_L(t) = ½f₀'(t) + ½f₁(t)
    static ClassicalSolution from_initial(const AsymptoticFunction& f0, const TestFunction& f1);

    const TestFunction& g_right() const { return g_right_; }
    const TestFunction& g_left() const { return g_left_; }

    // movers φ_X(t) = ½∫ g_X(t-u) sgn(u) du; atoms in closed form
    AsymptoticFunction mover_right() const;
    AsymptoticFunction mover_left() const;
    double mover_value(Chirality_t x, double t, const quad::Options& opts = {}) const;
    enum Chirality_t { right, left };

    double evaluate(double t, double x) const;  // φ(t,x) = φ_R(t-x) + φ_L(t+x)
    std::pair<AsymptoticFunction, TestFunction> to_initial() const;

    double c0() const;  // (∫g_L + ∫g_R)/2
    double c1() const;  // (∫g_L - ∫g_R)/2

  private:
    TestFunction g_right_{}, g_left_{};
};

SpaceClass classify(const ClassicalSolution& sol, double tol = 1e-8);

enum class BracketMethod { initial, sgn, movers };

// The Poisson bracket, frozen in the normalization
//   {φ1, φ2} = 2 Im(g_R1|g_R2) + 2 Im(g_L1|g_L2)
// so that the quantum commutator equals i {φ1, φ2}.  The three routes:
//   movers : ∫ φ'_R1 φ_R2 + ∫ φ'_L1 φ_L2
//   sgn    : ½ [ ∬ g_R1(t) sgn(t-s) g_R2(s) + (L) ]
//   initial: ½ ∫ (f02 f11 - f01 f12) dx
double poisson(const ClassicalSolution& a, const ClassicalSolution& b, BracketMethod method,
               const quad::Options& opts = {});

}  // namespace mqf::classical
