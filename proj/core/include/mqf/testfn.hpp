#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mqf/quadrature.hpp"

namespace mqf {

// decay class at |t| -> inf; schwartz ⊂ inverse_square ⊂ inverse
enum class Decay { schwartz = 0, inverse_square = 1, inverse = 2 };

// Hermite-Gaussian atom
//   value(t) = (1/w) (2π)^{-1/2} Σ_n p_n H_n(u) e^{-u²/2},   u = (t-c)/w,
// normalized so the unit atom (p = {1}, c = 0, w = 1) has transform e^{-k²/2}
// and unit integral.  Closed forms: transform, integral, cumulative.
struct Atom {
    double center = 0.0;
    double width = 1.0;
    std::vector<double> coeffs{};  // Hermite-basis coefficients p_n

    double value(double t) const;
    // ĝ(k) = e^{-ikc} Σ_n p_n (-i)^n H_n(wk) e^{-w²k²/2}
    std::complex<double> transform(double k) const;
    double zero_mode() const;          // ĝ(0) = Σ_m p_{2m} (2m)!/m!
    double cumulative(double t) const; // ∫_{-∞}^t
    double position_radius(double tol) const;
    double momentum_radius(double tol) const;
};

class TestFunction;

// provenance of a group-action image, enough to integrate by substitution:
// h(t) = (g∘F⁻¹)(t)·(F⁻¹)'(t) (weight 2) or (g∘F⁻¹)(t)·|...|^{...} (weight 1)
struct Pullback {
    const TestFunction* source = nullptr;       // u-space function
    std::function<double(double)> forward;      // F: u-space -> t-space
    std::function<double(double)> backward;     // F⁻¹
    std::vector<double> forward_poles;          // u where F blows up
    int weight = 2;
};

// escape hatch for functions with no closed-form atom representation
class Wrapper {
  public:
    virtual ~Wrapper() = default;
    virtual double value(double t) const = 0;
    virtual Decay decay() const = 0;
    virtual double zero_mode() const = 0;  // NaN when not absolutely convergent
    virtual std::vector<double> poles() const { return {}; }
    virtual std::complex<double> fourier(double k, const quad::Options& opts) const = 0;
    virtual const Pullback* pullback() const { return nullptr; }
};

// A real test function: a sum of Hermite-Gaussian atoms plus optional
// pointwise-evaluable wrapper terms (images under group actions).  Immutable
// after construction; the zero mode is computed eagerly, so evaluation is
// safe from concurrent contexts.
class TestFunction {
  public:
    TestFunction() = default;
    explicit TestFunction(std::vector<Atom> atoms);

    static TestFunction gaussian(double center = 0.0, double width = 1.0, double amplitude = 1.0);
    static TestFunction hermite_atom(double center, double width, std::vector<double> coeffs);
    static TestFunction from_wrapper(std::shared_ptr<const Wrapper> w, double scale = 1.0);
    // declared-decay pointwise function; zero_mode may be supplied if known
    static TestFunction from_function(std::function<double(double)> f, Decay decay,
                                      std::optional<double> zero_mode = std::nullopt,
                                      std::vector<double> poles = {}, double radius_hint = 50.0);

    double operator()(double t) const;
    double zero_mode() const { return zero_mode_; }
    Decay decay() const { return decay_; }
    bool atoms_only() const { return wrappers_.empty(); }
    bool empty() const { return atoms_.empty() && wrappers_.empty(); }
    const std::vector<Atom>& atoms() const { return atoms_; }

    std::complex<double> fourier(double k) const;
    std::complex<double> fourier(double k, const quad::Options& opts) const;

    TestFunction operator+(const TestFunction& other) const;
    TestFunction operator-() const;
    TestFunction operator*(double s) const;

    double position_radius(double tol = 1e-18) const;  // atoms only
    double momentum_radius(double tol = 1e-18) const;
    std::vector<double> singularities() const;

    // canonical identity for algebraic bookkeeping (atom data + wrapper ids)
    std::string canonical_key() const;

    struct WrapperTerm {
        std::shared_ptr<const Wrapper> w;
        double scale = 1.0;
    };
    const std::vector<WrapperTerm>& wrapper_terms() const { return wrappers_; }

  private:
    void canonicalize();
    void recompute_cached();

    std::vector<Atom> atoms_{};
    std::vector<WrapperTerm> wrappers_{};
    double zero_mode_ = 0.0;
    Decay decay_ = Decay::schwartz;
};

// ---- operations ---------------------------------------------------------

double evaluate(const TestFunction& g, double t);
std::complex<double> fourier(const TestFunction& g, double k);
double zero_mode(const TestFunction& g);
TestFunction derivative(const TestFunction& g);

// ---- group elements ------------------------------------------------------

struct AffineMap {
    double a = 1.0;  // t ↦ a t + b with a > 0
    double b = 0.0;
};

struct MobiusMap {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;  // det = ad - bc = 1
    double det() const { return a * d - b * c; }
    double apply(double t) const { return (a * t + b) / (c * t + d); }
    MobiusMap compose(const MobiusMap& o) const;  // this ∘ o as matrices
    MobiusMap inverse() const { return MobiusMap{d, -b, -c, a}; }
    bool is_affine() const { return c == 0.0; }
    static MobiusMap from_affine(double a, double b);  // the A₊(1,R) embedding
    void validate(double tol = 1e-12) const;
};

// strictly increasing smooth bijection of the line
class Diffeo {
  public:
    Diffeo(std::function<double(double)> fwd, std::function<double(double)> deriv,
           std::function<double(double)> inv = {});
    double forward(double u) const { return fwd_(u); }
    double deriv(double u) const { return deriv_(u); }
    double inverse(double t) const;
    void validate(double lo = -20.0, double hi = 20.0, int samples = 81) const;

  private:
    std::function<double(double)> fwd_, deriv_, inv_;
};

using GroupElement = std::variant<AffineMap, MobiusMap, Diffeo>;

// r_{a,b} g(t) = a^{-1} g(a^{-1}(t-b)); atoms map in closed form
TestFunction affine_pull(const TestFunction& g, double a, double b);
// weight-2 Möbius action (r_C g)(t) = (-ct+a)^{-2} g((dt-b)/(-ct+a));
// requires decay at least O(1/t²)
TestFunction mobius_boson(const TestFunction& g, const MobiusMap& C);
// weight-1 variant for fermions
TestFunction mobius_fermion(const TestFunction& g, const MobiusMap& C);
// r_F g = (g∘F⁻¹)·(F⁻¹)'; preserves the zero mode
TestFunction diffeo_pull(const TestFunction& g, const Diffeo& F);

// ---- exact atom algebra ---------------------------------------------------

TestFunction reflect(const TestFunction& g);                             // g(-t)
TestFunction convolve(const TestFunction& a, const TestFunction& b);     // ∫a(t)b(τ-t)dt
TestFunction correlate(const TestFunction& a, const TestFunction& b);    // ∫a(t)b(t-τ)dt
double integral_of_product(const TestFunction& a, const TestFunction& b);  // ∫ a b dt
double cumulative(const TestFunction& g, double t);                      // ∫_{-∞}^t

// ---- pairs and spacetime smearing ----------------------------------------

// (g_R, g_L) with matched zero modes ĝ_R(0) = ĝ_L(0)
class MoverPair {
  public:
    MoverPair() = default;
    MoverPair(TestFunction right, TestFunction left, double tol = 1e-8);
    const TestFunction& right() const { return right_; }
    const TestFunction& left() const { return left_; }
    double zero_mode() const { return 0.5 * (right_.zero_mode() + left_.zero_mode()); }
    MoverPair operator+(const MoverPair& o) const;
    MoverPair operator-() const;
    std::string canonical_key() const;

  private:
    TestFunction right_{}, left_{};
};

// finite sum of tensor products u_i(t) v_i(x)
class SpacetimeFunction {
  public:
    SpacetimeFunction() = default;
    SpacetimeFunction(TestFunction time_factor, TestFunction space_factor);
    void add_term(TestFunction time_factor, TestFunction space_factor);
    double operator()(double t, double x) const;
    struct Term {
        TestFunction u, v;
    };
    const std::vector<Term>& terms() const { return terms_; }

  private:
    std::vector<Term> terms_{};
};

// ĝ_R(k) = f̂(k,k), ĝ_L(k) = f̂(k,-k) with f̂(E,p) = ∫ f e^{iEt-ipx};
// assembled exactly from 1D atom transforms
MoverPair from_spacetime(const SpacetimeFunction& f);

}  // namespace mqf
