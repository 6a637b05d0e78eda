#include "mqf/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mqf/hermite.hpp"

namespace mqf {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143268;
constexpr double kArgCutoff = 42.0;  // e^{-u²/2} underflows well before this

double double_factorial_ratio(int m) {  // (2m)!/m!
    double v = 1.0;
    for (int j = 1; j <= m; ++j) v *= 2.0 * (2 * j - 1);
    return v;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

// polynomial helpers (coefficient vectors, index = power)
std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.empty() || q.empty()) return {};
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

// q with q(s) = p(s + d), by binomial expansion
std::vector<double> poly_shift(const std::vector<double>& p, double d) {
    std::vector<double> q(p.size(), 0.0);
    for (std::size_t n = 0; n < p.size(); ++n) {
        if (p[n] == 0.0) continue;
        double binom = 1.0;
        double dpow = 1.0;
        for (std::size_t k = 0; k <= n; ++k) {
            q[n - k] += p[n] * binom * dpow;
            binom *= static_cast<double>(n - k) / static_cast<double>(k + 1);
            dpow *= d;
        }
    }
    return q;
}

// "transform polynomial": ĝ(k) = e^{-ikc} [Σ_j (-i)^j β_j k^j] e^{-W²k²/2}
struct TransformPoly {
    double center = 0.0;
    double width = 1.0;
    std::vector<double> beta{};
};

TransformPoly to_tp(const Atom& a) {
    TransformPoly tp{a.center, a.width, std::vector<double>(std::max<std::size_t>(a.coeffs.size(), 1), 0.0)};
    for (std::size_t n = 0; n < a.coeffs.size(); ++n) {
        if (a.coeffs[n] == 0.0) continue;
        const auto hn = hermite::coefficients(static_cast<int>(n));
        for (std::size_t m = 0; m < hn.size(); ++m) {
            if (hn[m] == 0.0) continue;
            // (-i)^n H_n(wk) -> (-i)^m [ h_{n,m} w^m (-1)^{(n-m)/2} ] k^m
            const int half = static_cast<int>(n - m) / 2;
            const double sign = (half % 2 == 0) ? 1.0 : -1.0;
            tp.beta[m] += a.coeffs[n] * hn[m] * std::pow(a.width, static_cast<double>(m)) * sign;
        }
    }
    return tp;
}

Atom from_tp(const TransformPoly& tp) {
    Atom out{tp.center, tp.width, std::vector<double>(tp.beta.size(), 0.0)};
    for (std::size_t m = 0; m < tp.beta.size(); ++m) {
        if (tp.beta[m] == 0.0) continue;
        std::vector<double> mono(m + 1, 0.0);
        mono[m] = 1.0;
        const auto herm = hermite::to_hermite(mono);
        const double wm = std::pow(tp.width, -static_cast<double>(m));
        for (std::size_t n = 0; n < herm.size(); ++n) {
            if (herm[n] == 0.0) continue;
            const int half = static_cast<int>(m - n) / 2;
            const double sign = (half % 2 == 0) ? 1.0 : -1.0;
            out.coeffs[n] += tp.beta[m] * wm * herm[n] * sign;
        }
    }
    return out;
}

Atom convolve_atoms(const Atom& x, const Atom& y) {
    const TransformPoly tx = to_tp(x);
    const TransformPoly ty = to_tp(y);
    TransformPoly tr;
    tr.center = tx.center + ty.center;
    tr.width = std::hypot(tx.width, ty.width);
    tr.beta = poly_mul(tx.beta, ty.beta);
    if (tr.beta.empty()) tr.beta = {0.0};
    return from_tp(tr);
}

Atom reflect_atom(const Atom& a) {
    Atom out{-a.center, a.width, a.coeffs};
    for (std::size_t n = 1; n < out.coeffs.size(); n += 2) out.coeffs[n] = -out.coeffs[n];
    return out;
}

double product_integral_atoms(const Atom& A, const Atom& B) {
    // ∫ A B dt with A B = (2π w1 w2)^{-1} P1(u1) P2(u2) e^{-a(t-m)² - δ}
    const double w1 = A.width, w2 = B.width, c1 = A.center, c2 = B.center;
    const double ia = 0.5 * (1.0 / (w1 * w1) + 1.0 / (w2 * w2));
    const double m = (c1 / (w1 * w1) + c2 / (w2 * w2)) / (2.0 * ia);
    const double delta = 0.5 * (c1 * c1 / (w1 * w1) + c2 * c2 / (w2 * w2)) - ia * m * m;

    // P1((t-c1)/w1) as a polynomial in s = t - m: u1 = (s + (m-c1))/w1
    auto in_s = [m](const Atom& at) {
        std::vector<double> mono = hermite::to_monomial(at.coeffs);  // powers of u
        // u = (s + d)/w: first shift by d, then scale by 1/w
        std::vector<double> shifted = poly_shift(mono, (m - at.center) / at.width);
        double wpow = 1.0;
        for (std::size_t j = 0; j < shifted.size(); ++j) {
            shifted[j] /= wpow;
            wpow *= at.width;
        }
        return shifted;
    };
    const std::vector<double> prod = poly_mul(in_s(A), in_s(B));

    double integral = 0.0;
    double moment = std::sqrt(std::numbers::pi / ia);  // ∫ e^{-a s²} ds
    for (std::size_t j = 0; j < prod.size(); j += 2) {
        if (j > 0) moment *= static_cast<double>(j - 1) / (2.0 * ia);  // (2j-1)!!/(2a)^j ladder
        integral += prod[j] * moment;
    }
    return integral * std::exp(-delta) / (2.0 * std::numbers::pi * w1 * w2);
}

}  // namespace

// ---- Atom -----------------------------------------------------------------

double Atom::value(double t) const {
    const double u = (t - center) / width;
    if (std::abs(u) > kArgCutoff) return 0.0;
    return kInvSqrt2Pi / width * hermite::series(coeffs, u) * std::exp(-0.5 * u * u);
}

std::complex<double> Atom::transform(double k) const {
    const double x = width * k;
    if (std::abs(x) > kArgCutoff) return {0.0, 0.0};
    const double damp = std::exp(-0.5 * x * x);
    std::complex<double> sum = 0.0;
    std::complex<double> phase_n{1.0, 0.0};  // (-i)^n
    double hm = 1.0, h = 2.0 * x;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        const double hn = (n == 0) ? 1.0 : h;
        sum += coeffs[n] * phase_n * hn;
        if (n >= 1) {
            const double hp = 2.0 * x * h - 2.0 * static_cast<double>(n) * hm;
            hm = h;
            h = hp;
        }
        phase_n *= std::complex<double>(0.0, -1.0);
    }
    return std::exp(std::complex<double>(0.0, -k * center)) * damp * sum;
}

double Atom::zero_mode() const {
    double z = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); n += 2) z += coeffs[n] * double_factorial_ratio(static_cast<int>(n / 2));
    return z;
}

double Atom::cumulative(double t) const {
    const double x = (t - center) / width;
    // ∫ H_n e^{-u²/2} du = -2 H_{n-1} e^{-u²/2} + 2(n-1) ∫ H_{n-2} e^{-u²/2} du
    std::vector<double> work = coeffs;
    std::vector<double> gauss(coeffs.size() + 1, 0.0);
    double step = 0.0;
    for (std::size_t n = work.size(); n-- > 0;) {
        const double cn = work[n];
        if (cn == 0.0) continue;
        if (n == 0) {
            step += cn;
        } else {
            gauss[n - 1] += -2.0 * cn;
            if (n >= 2) work[n - 2] += 2.0 * static_cast<double>(n - 1) * cn;
        }
    }
    double g = 0.0;
    if (std::abs(x) <= kArgCutoff) g = kInvSqrt2Pi * hermite::series(gauss, x) * std::exp(-0.5 * x * x);
    return step * normal_cdf(x) + g;
}

double Atom::position_radius(double tol) const {
    double amp = 0.0;
    for (double p : coeffs) amp += std::abs(p);
    amp = std::max(amp, 1e-30) * kInvSqrt2Pi / width;
    const int deg = coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1;
    double u = 4.0;
    while (u < 300.0 && amp * std::pow(2.0 * u, deg) * std::exp(-0.5 * u * u) > tol) u *= 1.2;
    return std::abs(center) + width * u;
}

double Atom::momentum_radius(double tol) const {
    double amp = 0.0;
    for (double p : coeffs) amp += std::abs(p);
    amp = std::max(amp, 1e-30);
    const int deg = coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1;
    double x = 4.0;
    while (x < 300.0 && amp * std::pow(2.0 * x, deg) * std::exp(-0.5 * x * x) > tol) x *= 1.2;
    return x / width;
}

// ---- wrappers ---------------------------------------------------------------

namespace {

class MobiusImage final : public Wrapper {
  public:
    MobiusImage(TestFunction source, MobiusMap C, int weight)
        : source_(std::move(source)), map_(C), weight_(weight) {
        pb_.source = &source_;
        // value uses F⁻¹(t) = (dt-b)/(-ct+a), so the forward map is u ↦ (au+b)/(cu+d)
        pb_.forward = [C](double u) { return C.apply(u); };
        pb_.backward = [C](double t) { return C.inverse().apply(t); };
        if (map_.c != 0.0) pb_.forward_poles.push_back(-map_.d / map_.c);
        pb_.weight = weight_;
    }

    double value(double t) const override {
        const double den = -map_.c * t + map_.a;
        if (std::abs(den) < 1e-150) return 0.0;  // removable on a null set
        const double arg = (map_.d * t - map_.b) / den;
        const double src = source_(arg);
        if (src == 0.0) return 0.0;
        return (weight_ == 2) ? src / (den * den) : src / den;
    }

    Decay decay() const override {
        if (map_.c == 0.0) return source_.decay();
        return weight_ == 2 ? Decay::inverse_square : Decay::inverse;
    }

    double zero_mode() const override {
        return weight_ == 2 ? source_.zero_mode() : std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<double> poles() const override {
        std::vector<double> out;
        if (map_.c != 0.0) out.push_back(map_.a / map_.c);
        for (double p : source_.singularities()) {
            // source pole at u maps to t = F(u)
            const double den = map_.c * p + map_.d;
            if (std::abs(den) > 1e-150) out.push_back((map_.a * p + map_.b) / den);
        }
        return out;
    }

    std::complex<double> fourier(double k, const quad::Options& opts) const override {
        if (weight_ != 2)
            throw std::domain_error("fourier: transform of a weight-1 (fermionic) image is not supported");
        // ∫ h(t) e^{-ikt} dt = ∫ g(u) e^{-ik F(u)} du
        const double R = source_.atoms_only() ? source_.position_radius(1e-18) : 60.0;
        quad::Options o = opts;
        for (double p : pb_.forward_poles) o.breakpoints.push_back(p);
        for (double p : source_.singularities()) o.breakpoints.push_back(p);
        o.max_panels = std::max(o.max_panels, 20000);
        auto f = [&](double u) {
            return source_(u) * std::exp(std::complex<double>(0.0, -k * pb_.forward(u)));
        };
        return quad::integrate(f, -R, R, o).value;
    }

    const Pullback* pullback() const override { return &pb_; }

  private:
    TestFunction source_;
    MobiusMap map_;
    int weight_;
    Pullback pb_;
};

class DiffeoImage final : public Wrapper {
  public:
    DiffeoImage(TestFunction source, Diffeo F) : source_(std::move(source)), map_(std::move(F)) {
        pb_.source = &source_;
        const Diffeo& m = map_;
        pb_.forward = [m](double u) { return m.forward(u); };
        pb_.backward = [m](double t) { return m.inverse(t); };
        pb_.weight = 2;
    }

    double value(double t) const override {
        const double u = map_.inverse(t);
        const double d = map_.deriv(u);
        return source_(u) / d;
    }

    // test diffeos are affine at infinity, so the class is inherited
    Decay decay() const override { return source_.decay(); }
    double zero_mode() const override { return source_.zero_mode(); }

    std::vector<double> poles() const override {
        std::vector<double> out;
        for (double p : source_.singularities()) out.push_back(map_.forward(p));
        return out;
    }

    std::complex<double> fourier(double k, const quad::Options& opts) const override {
        const double R = source_.atoms_only() ? source_.position_radius(1e-18) : 60.0;
        quad::Options o = opts;
        o.max_panels = std::max(o.max_panels, 20000);
        auto f = [&](double u) {
            return source_(u) * std::exp(std::complex<double>(0.0, -k * map_.forward(u)));
        };
        return quad::integrate(f, -R, R, o).value;
    }

    const Pullback* pullback() const override { return &pb_; }

  private:
    TestFunction source_;
    Diffeo map_;
    Pullback pb_;
};

class AffineImage final : public Wrapper {
  public:
    AffineImage(TestFunction source, double a, double b) : source_(std::move(source)), a_(a), b_(b) {
        pb_.source = &source_;
        const double aa = a_, bb = b_;
        pb_.forward = [aa, bb](double u) { return aa * u + bb; };
        pb_.backward = [aa, bb](double t) { return (t - bb) / aa; };
        pb_.weight = 2;
    }
    double value(double t) const override { return source_((t - b_) / a_) / a_; }
    Decay decay() const override { return source_.decay(); }
    double zero_mode() const override { return source_.zero_mode(); }
    std::vector<double> poles() const override {
        std::vector<double> out;
        for (double p : source_.singularities()) out.push_back(a_ * p + b_);
        return out;
    }
    std::complex<double> fourier(double k, const quad::Options& opts) const override {
        // exact rule: e^{-ikb} ĝ(ak)
        return std::exp(std::complex<double>(0.0, -k * b_)) * source_.fourier(a_ * k, opts);
    }
    const Pullback* pullback() const override { return &pb_; }

  private:
    TestFunction source_;
    double a_, b_;
    Pullback pb_;
};

class GenericWrapper final : public Wrapper {
  public:
    GenericWrapper(std::function<double(double)> f, Decay d, std::optional<double> zm,
                   std::vector<double> poles, double radius_hint)
        : f_(std::move(f)), decay_(d), poles_(std::move(poles)), radius_(radius_hint) {
        if (zm.has_value()) {
            zero_mode_ = *zm;
        } else if (decay_ == Decay::inverse) {
            zero_mode_ = std::numeric_limits<double>::quiet_NaN();
        } else {
            quad::Options o;
            o.abs_tol = 1e-10;
            o.rel_tol = 1e-10;
            o.breakpoints = poles_;
            o.throw_on_failure = false;
            auto fn = [this](double t) { return std::complex<double>(f_(t), 0.0); };
            zero_mode_ = quad::integrate_line(fn, o).value.real();
        }
    }
    double value(double t) const override { return f_(t); }
    Decay decay() const override { return decay_; }
    double zero_mode() const override { return zero_mode_; }
    std::vector<double> poles() const override { return poles_; }
    std::complex<double> fourier(double k, const quad::Options& opts) const override {
        if (decay_ == Decay::inverse)
            throw std::domain_error("fourier: O(1/t) wrappers have no absolutely convergent transform");
        double T = radius_;
        double tail = 0.0;
        if (decay_ == Decay::inverse_square) {
            const double C =
                1.5 * std::max(std::abs(f_(radius_)) * radius_ * radius_,
                               std::abs(f_(-radius_)) * radius_ * radius_);
            T = std::max(radius_, std::sqrt(std::max(C, 1e-30) / (0.1 * opts.abs_tol)));
            T = std::min(T, 1e7);
            tail = 2.0 * C / T;
        }
        quad::Options o = opts;
        o.breakpoints = poles_;
        o.max_panels = std::max(o.max_panels, 20000);
        auto fn = [&](double t) { return f_(t) * std::exp(std::complex<double>(0.0, -k * t)); };
        auto r = quad::integrate(fn, -T, T, o);
        r.error += tail;
        return r.value;
    }

  private:
    std::function<double(double)> f_;
    Decay decay_;
    std::vector<double> poles_;
    double radius_;
    double zero_mode_ = 0.0;
};

// finite-difference derivative of the wrapper part of a function
class DerivativeWrapper final : public Wrapper {
  public:
    DerivativeWrapper(TestFunction source, double step) : source_(std::move(source)), h_(step) {}
    double value(double t) const override {
        const double h = h_ * (1.0 + std::abs(t));
        return (8.0 * (source_(t + h) - source_(t - h)) - (source_(t + 2 * h) - source_(t - 2 * h))) /
               (12.0 * h);
    }
    Decay decay() const override { return source_.decay(); }
    double zero_mode() const override { return 0.0; }  // total derivative
    std::vector<double> poles() const override { return source_.singularities(); }
    std::complex<double> fourier(double k, const quad::Options& opts) const override {
        return std::complex<double>(0.0, k) * source_.fourier(k, opts);
    }

  private:
    TestFunction source_;
    double h_;
};

}  // namespace

// ---- TestFunction -----------------------------------------------------------

TestFunction::TestFunction(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    canonicalize();
    recompute_cached();
}

TestFunction TestFunction::gaussian(double center, double width, double amplitude) {
    return TestFunction({Atom{center, width, {amplitude}}});
}

TestFunction TestFunction::hermite_atom(double center, double width, std::vector<double> coeffs) {
    return TestFunction({Atom{center, width, std::move(coeffs)}});
}

TestFunction TestFunction::from_wrapper(std::shared_ptr<const Wrapper> w, double scale) {
    TestFunction g;
    g.wrappers_.push_back({std::move(w), scale});
    g.recompute_cached();
    return g;
}

TestFunction TestFunction::from_function(std::function<double(double)> f, Decay decay,
                                         std::optional<double> zero_mode, std::vector<double> poles,
                                         double radius_hint) {
    return from_wrapper(
        std::make_shared<GenericWrapper>(std::move(f), decay, zero_mode, std::move(poles), radius_hint));
}

void TestFunction::canonicalize() {
    for (auto& a : atoms_) {
        while (!a.coeffs.empty() && a.coeffs.back() == 0.0) a.coeffs.pop_back();
    }
    std::erase_if(atoms_, [](const Atom& a) { return a.coeffs.empty(); });
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) {
        return std::tie(x.center, x.width) < std::tie(y.center, y.width);
    });
    std::vector<Atom> merged;
    for (auto& a : atoms_) {
        if (!merged.empty() && merged.back().center == a.center && merged.back().width == a.width) {
            auto& dst = merged.back().coeffs;
            if (dst.size() < a.coeffs.size()) dst.resize(a.coeffs.size(), 0.0);
            for (std::size_t n = 0; n < a.coeffs.size(); ++n) dst[n] += a.coeffs[n];
        } else {
            merged.push_back(std::move(a));
        }
    }
    for (auto& a : merged) {
        while (!a.coeffs.empty() && a.coeffs.back() == 0.0) a.coeffs.pop_back();
    }
    std::erase_if(merged, [](const Atom& a) {
        return std::all_of(a.coeffs.begin(), a.coeffs.end(), [](double c) { return c == 0.0; });
    });
    atoms_ = std::move(merged);
}

void TestFunction::recompute_cached() {
    zero_mode_ = 0.0;
    decay_ = Decay::schwartz;
    for (const auto& a : atoms_) zero_mode_ += a.zero_mode();
    for (const auto& wt : wrappers_) {
        zero_mode_ += wt.scale * wt.w->zero_mode();
        decay_ = static_cast<Decay>(std::max(static_cast<int>(decay_), static_cast<int>(wt.w->decay())));
    }
}

double TestFunction::operator()(double t) const {
    double v = 0.0;
    for (const auto& a : atoms_) v += a.value(t);
    for (const auto& wt : wrappers_) v += wt.scale * wt.w->value(t);
    return v;
}

std::complex<double> TestFunction::fourier(double k) const { return fourier(k, quad::Options{}); }

std::complex<double> TestFunction::fourier(double k, const quad::Options& opts) const {
    std::complex<double> v = 0.0;
    for (const auto& a : atoms_) v += a.transform(k);
    for (const auto& wt : wrappers_) v += wt.scale * wt.w->fourier(k, opts);
    return v;
}

TestFunction TestFunction::operator+(const TestFunction& other) const {
    TestFunction out;
    out.atoms_ = atoms_;
    out.atoms_.insert(out.atoms_.end(), other.atoms_.begin(), other.atoms_.end());
    out.wrappers_ = wrappers_;
    out.wrappers_.insert(out.wrappers_.end(), other.wrappers_.begin(), other.wrappers_.end());
    out.canonicalize();
    out.recompute_cached();
    return out;
}

TestFunction TestFunction::operator-() const { return (*this) * -1.0; }

TestFunction TestFunction::operator*(double s) const {
    TestFunction out = *this;
    for (auto& a : out.atoms_)
        for (auto& c : a.coeffs) c *= s;
    for (auto& wt : out.wrappers_) wt.scale *= s;
    out.canonicalize();
    out.recompute_cached();
    return out;
}

double TestFunction::position_radius(double tol) const {
    double r = 1.0;
    for (const auto& a : atoms_) r = std::max(r, a.position_radius(tol));
    if (!wrappers_.empty()) return std::numeric_limits<double>::infinity();
    return r;
}

double TestFunction::momentum_radius(double tol) const {
    double r = 1.0;
    for (const auto& a : atoms_) r = std::max(r, a.momentum_radius(tol));
    for (const auto& wt : wrappers_) {
        // numeric scan; images decay superpolynomially but with no closed rate
        double k = 4.0;
        quad::Options o;
        o.abs_tol = 1e-9;
        o.rel_tol = 1e-6;
        o.throw_on_failure = false;
        while (k < 400.0 && std::abs(wt.scale * wt.w->fourier(k, o)) > tol) k *= 1.6;
        r = std::max(r, k);
    }
    return r;
}

std::vector<double> TestFunction::singularities() const {
    std::vector<double> out;
    for (const auto& wt : wrappers_)
        for (double p : wt.w->poles()) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string TestFunction::canonical_key() const {
    std::string key;
    auto push = [&key](double x) {
        if (x == 0.0) x = 0.0;  // normalize -0.0
        char buf[sizeof(double)];
        std::memcpy(buf, &x, sizeof(double));
        key.append(buf, sizeof(double));
    };
    for (const auto& a : atoms_) {
        push(a.center);
        push(a.width);
        push(static_cast<double>(a.coeffs.size()));
        for (double c : a.coeffs) push(c);
    }
    for (const auto& wt : wrappers_) {
        push(wt.scale);
        push(static_cast<double>(reinterpret_cast<std::uintptr_t>(wt.w.get())));
    }
    return key;
}

// ---- free operations -------------------------------------------------------

double evaluate(const TestFunction& g, double t) { return g(t); }
std::complex<double> fourier(const TestFunction& g, double k) { return g.fourier(k); }
double zero_mode(const TestFunction& g) { return g.zero_mode(); }

TestFunction derivative(const TestFunction& g) {
    std::vector<Atom> atoms;
    for (const auto& a : g.atoms()) {
        Atom d{a.center, a.width, std::vector<double>(a.coeffs.size() + 1, 0.0)};
        for (std::size_t n = 0; n < a.coeffs.size(); ++n) {
            // d/dt H_n(u) e^{-u²/2} = (n H_{n-1} - ½H_{n+1}) e^{-u²/2} / w
            if (n >= 1) d.coeffs[n - 1] += static_cast<double>(n) * a.coeffs[n] / a.width;
            d.coeffs[n + 1] -= 0.5 * a.coeffs[n] / a.width;
        }
        atoms.push_back(std::move(d));
    }
    TestFunction out(std::move(atoms));
    if (!g.atoms_only()) {
        TestFunction wrap_part;
        for (const auto& wt : g.wrapper_terms()) wrap_part = wrap_part + TestFunction::from_wrapper(wt.w, wt.scale);
        out = out + TestFunction::from_wrapper(std::make_shared<DerivativeWrapper>(std::move(wrap_part), 1e-5));
    }
    return out;
}

// ---- group elements ----------------------------------------------------------

MobiusMap MobiusMap::compose(const MobiusMap& o) const {
    return MobiusMap{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

MobiusMap MobiusMap::from_affine(double a_, double b_) {
    const double r = std::sqrt(a_);
    return MobiusMap{r, b_ / r, 0.0, 1.0 / r};
}

void MobiusMap::validate(double tol) const {
    if (std::abs(det() - 1.0) > tol) throw std::invalid_argument("MobiusMap: det != 1");
}

Diffeo::Diffeo(std::function<double(double)> fwd, std::function<double(double)> deriv,
               std::function<double(double)> inv)
    : fwd_(std::move(fwd)), deriv_(std::move(deriv)), inv_(std::move(inv)) {}

double Diffeo::inverse(double t) const {
    if (inv_) return inv_(t);
    // safeguarded Newton; the map is strictly increasing
    double lo = t - 1.0, hi = t + 1.0;
    while (fwd_(lo) > t) lo -= std::max(1.0, std::abs(lo));
    while (fwd_(hi) < t) hi += std::max(1.0, std::abs(hi));
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double f = fwd_(u) - t;
        if (f > 0)
            hi = u;
        else
            lo = u;
        const double d = deriv_(u);
        double step = (d > 0) ? f / d : 0.0;
        double un = u - step;
        if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
        if (std::abs(un - u) < 1e-15 * (1.0 + std::abs(u))) return un;
        u = un;
    }
    return u;
}

void Diffeo::validate(double lo, double hi, int samples) const {
    for (int i = 0; i < samples; ++i) {
        const double u = lo + (hi - lo) * i / (samples - 1);
        if (!(deriv_(u) > 0.0)) throw std::invalid_argument("Diffeo: derivative not positive");
    }
}

// ---- group actions ------------------------------------------------------------

TestFunction affine_pull(const TestFunction& g, double a, double b) {
    if (!(a > 0.0)) throw std::invalid_argument("affine_pull: requires a > 0");
    std::vector<Atom> atoms;
    for (const auto& at : g.atoms()) atoms.push_back(Atom{a * at.center + b, a * at.width, at.coeffs});
    TestFunction out(std::move(atoms));
    if (!g.atoms_only()) {
        TestFunction wrap_part;
        for (const auto& wt : g.wrapper_terms()) wrap_part = wrap_part + TestFunction::from_wrapper(wt.w, wt.scale);
        out = out + TestFunction::from_wrapper(std::make_shared<AffineImage>(std::move(wrap_part), a, b));
    }
    return out;
}

TestFunction mobius_boson(const TestFunction& g, const MobiusMap& C) {
    C.validate();
    if (g.decay() == Decay::inverse)
        throw std::invalid_argument("mobius_boson: requires decay class at least O(1/t^2)");
    if (C.is_affine()) {
        // [[α, β], [0, 1/α]] acts as r_{α², αβ}
        return affine_pull(g, C.a * C.a, C.a * C.b);
    }
    return TestFunction::from_wrapper(std::make_shared<MobiusImage>(g, C, 2));
}

TestFunction mobius_fermion(const TestFunction& g, const MobiusMap& C) {
    C.validate();
    if (C.is_affine()) {
        std::vector<Atom> atoms;
        const double ap = C.a * C.a, bp = C.a * C.b;
        for (const auto& at : g.atoms()) {
            Atom m{ap * at.center + bp, ap * at.width, at.coeffs};
            for (auto& c : m.coeffs) c *= C.a;  // weight-1 prefactor α^{-1} vs the atom 1/w' convention
            atoms.push_back(std::move(m));
        }
        TestFunction out(std::move(atoms));
        if (!g.atoms_only()) {
            TestFunction wrap_part;
            for (const auto& wt : g.wrapper_terms())
                wrap_part = wrap_part + TestFunction::from_wrapper(wt.w, wt.scale);
            out = out + TestFunction::from_wrapper(std::make_shared<MobiusImage>(std::move(wrap_part), C, 1));
        }
        return out;
    }
    return TestFunction::from_wrapper(std::make_shared<MobiusImage>(g, C, 1));
}

TestFunction diffeo_pull(const TestFunction& g, const Diffeo& F) {
    return TestFunction::from_wrapper(std::make_shared<DiffeoImage>(g, F));
}

// ---- exact atom algebra --------------------------------------------------------

namespace {
void require_atoms(const TestFunction& g, const char* who) {
    if (!g.atoms_only()) throw std::invalid_argument(std::string(who) + ": closed form needs atom-only input");
}
}  // namespace

TestFunction reflect(const TestFunction& g) {
    require_atoms(g, "reflect");
    std::vector<Atom> atoms;
    for (const auto& a : g.atoms()) atoms.push_back(reflect_atom(a));
    return TestFunction(std::move(atoms));
}

TestFunction convolve(const TestFunction& a, const TestFunction& b) {
    require_atoms(a, "convolve");
    require_atoms(b, "convolve");
    std::vector<Atom> atoms;
    for (const auto& x : a.atoms())
        for (const auto& y : b.atoms()) atoms.push_back(convolve_atoms(x, y));
    return TestFunction(std::move(atoms));
}

TestFunction correlate(const TestFunction& a, const TestFunction& b) { return convolve(a, reflect(b)); }

double integral_of_product(const TestFunction& a, const TestFunction& b) {
    require_atoms(a, "integral_of_product");
    require_atoms(b, "integral_of_product");
    double v = 0.0;
    for (const auto& x : a.atoms())
        for (const auto& y : b.atoms()) v += product_integral_atoms(x, y);
    return v;
}

double cumulative(const TestFunction& g, double t) {
    require_atoms(g, "cumulative");
    double v = 0.0;
    for (const auto& a : g.atoms()) v += a.cumulative(t);
    return v;
}

// ---- pairs and spacetime ---------------------------------------------------------

MoverPair::MoverPair(TestFunction right, TestFunction left, double tol)
    : right_(std::move(right)), left_(std::move(left)) {
    const double zr = right_.zero_mode();
    const double zl = left_.zero_mode();
    if (std::isnan(zr) || std::isnan(zl) || std::abs(zr - zl) > tol)
        throw std::invalid_argument("MoverPair: zero modes do not match");
}

MoverPair MoverPair::operator+(const MoverPair& o) const {
    MoverPair out;
    out.right_ = right_ + o.right_;
    out.left_ = left_ + o.left_;
    return out;
}

MoverPair MoverPair::operator-() const {
    MoverPair out;
    out.right_ = -right_;
    out.left_ = -left_;
    return out;
}

std::string MoverPair::canonical_key() const {
    return right_.canonical_key() + "|" + left_.canonical_key();
}

SpacetimeFunction::SpacetimeFunction(TestFunction time_factor, TestFunction space_factor) {
    add_term(std::move(time_factor), std::move(space_factor));
}

void SpacetimeFunction::add_term(TestFunction time_factor, TestFunction space_factor) {
    terms_.push_back({std::move(time_factor), std::move(space_factor)});
}

double SpacetimeFunction::operator()(double t, double x) const {
    double v = 0.0;
    for (const auto& term : terms_) v += term.u(t) * term.v(x);
    return v;
}

MoverPair from_spacetime(const SpacetimeFunction& f) {
    // ĝ_R(k) = f̂(k,k) -> g_R(τ) = ∫ v(x) u(x-τ) dx;  ĝ_L(k) = f̂(k,-k) -> g_L = reflect(u*v)
    TestFunction gr, gl;
    for (const auto& term : f.terms()) {
        gr = gr + correlate(term.v, term.u);
        gl = gl + reflect(convolve(term.u, term.v));
    }
    return MoverPair(std::move(gr), std::move(gl), 1e-10);
}

}  // namespace mqf
