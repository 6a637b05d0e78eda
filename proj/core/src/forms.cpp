#include "mqf/forms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mqf::forms {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// one side of a position-space kernel integral, transported to its own
// parameter space: ∫ h(t) X(t) dt = Σ_terms scale ∫ eval(u) X(F(u)) du
struct Transport {
    std::function<double(double)> eval;
    std::function<double(double)> forward;   // F(u)
    std::function<double(double)> backward;  // F⁻¹(t)
    std::vector<double> breakpoints;         // u-space
    double radius = 0.0;
    double scale = 1.0;
};

std::vector<Transport> decompose(const TestFunction& g) {
    std::vector<Transport> out;
    auto identity = [](double x) { return x; };
    if (!g.atoms().empty()) {
        TestFunction atom_part{std::vector<Atom>(g.atoms())};
        Transport t;
        t.radius = atom_part.position_radius(1e-18);
        t.eval = [f = std::move(atom_part)](double u) { return f(u); };
        t.forward = identity;
        t.backward = identity;
        out.push_back(std::move(t));
    }
    for (const auto& wt : g.wrapper_terms()) {
        Transport t;
        t.scale = wt.scale;
        const Pullback* pb = wt.w->pullback();
        if (pb != nullptr && pb->weight == 2) {
            const TestFunction& src = *pb->source;
            t.radius = src.atoms_only() ? src.position_radius(1e-18) : 60.0;
            t.eval = [&src](double u) { return src(u); };
            t.forward = pb->forward;
            t.backward = pb->backward;
            t.breakpoints = pb->forward_poles;
            for (double p : src.singularities()) t.breakpoints.push_back(p);
        } else {
            // opaque wrapper: integrate in place; tails limited by the decay class
            t.radius = (wt.w->decay() == Decay::schwartz) ? 60.0 : 2e4;
            t.eval = [w = wt.w](double u) { return w->value(u); };
            t.forward = identity;
            t.backward = identity;
            t.breakpoints = wt.w->poles();
        }
        out.push_back(std::move(t));
    }
    return out;
}

// ∬ a(u) W(Fa(u) - Fb(v)) b(v) du dv for one pair of transported terms
quad::Result kernel_pair(const Transport& ta, const Transport& tb, MassScale mu,
                         const quad::Options& opts) {
    quad::Options inner = opts;
    inner.abs_tol = 0.1 * opts.abs_tol;
    inner.rel_tol = 1e-9;
    inner.throw_on_failure = false;
    inner.max_panels = 4000;

    double inner_err = 0.0;
    auto outer_fn = [&](double u) -> std::complex<double> {
        const double au = ta.eval(u);
        if (au == 0.0) return {0.0, 0.0};
        const double tu = ta.forward(u);
        quad::Options io = inner;
        io.breakpoints = tb.breakpoints;
        const double diag = tb.backward(tu);
        if (std::isfinite(diag)) io.breakpoints.push_back(diag);
        auto inner_fn = [&](double v) -> std::complex<double> {
            const double bv = tb.eval(v);
            if (bv == 0.0) return {0.0, 0.0};
            const double tv = tb.forward(v);
            const double dt = tu - tv;
            if (dt == 0.0) return {0.0, 0.0};  // null set; panels are split at the diagonal
            return bv * kernel_W(dt, mu);
        };
        auto r = quad::integrate(inner_fn, -tb.radius, tb.radius, io);
        inner_err = std::max(inner_err, r.error);
        return au * r.value;
    };

    quad::Options outer = opts;
    outer.breakpoints = ta.breakpoints;
    outer.max_panels = std::max(outer.max_panels, 20000);
    outer.throw_on_failure = false;
    auto res = quad::integrate(outer_fn, -ta.radius, ta.radius, outer);
    res.error += inner_err * 2.0 * ta.radius;
    res.value *= ta.scale * tb.scale;
    res.error *= std::abs(ta.scale * tb.scale);
    return res;
}

FormValue reg_form_momentum(const TestFunction& g1, const TestFunction& g2, MassScale mu,
                            const FormOptions& opts) {
    const double z = g1.zero_mode() * g2.zero_mode();
    const double s = opts.split;
    const double K = std::max({g1.momentum_radius(1e-16), g2.momentum_radius(1e-16), 2.0 * s});

    auto h = [&](double k) { return std::conj(g1.fourier(k)) * g2.fourier(k); };

    quad::Options qo = opts.quad;
    qo.throw_on_failure = false;
    auto low = quad::integrate([&](double k) { return (h(k) - z) / k; }, 0.0, s, qo);
    auto high = quad::integrate([&](double k) { return h(k) / k; }, s, K, qo);

    const double tail = std::abs(h(K)) / K;
    FormValue out;
    out.value = (low.value + high.value + z * (std::log(s) - std::log(mu.mu))) / kTwoPi;
    out.error_estimate = (low.error + high.error + tail) / kTwoPi;
    out.mu_used = mu;
    if (out.error_estimate > std::max(opts.quad.abs_tol, opts.quad.rel_tol * std::abs(out.value)) &&
        opts.quad.throw_on_failure)
        throw quad::QuadratureError(out.error_estimate, opts.quad.abs_tol);
    return out;
}

FormValue reg_form_pullback(const TestFunction& g1, const TestFunction& g2, MassScale mu,
                            const FormOptions& opts) {
    FormValue out;
    out.mu_used = mu;
    for (const auto& ta : decompose(g1))
        for (const auto& tb : decompose(g2)) {
            auto r = kernel_pair(ta, tb, mu, opts.quad);
            out.value += r.value;
            out.error_estimate += r.error;
        }
    return out;
}

}  // namespace

MassScale::MassScale(double m) : mu(m) {
    if (!(m > 0.0)) throw std::invalid_argument("MassScale: mu must be positive");
}

std::complex<double> kernel_W(double t, MassScale mu) {
    if (t == 0.0) throw std::domain_error("kernel_W: logarithmic singularity at t = 0");
    const double sign = (t > 0.0) ? 1.0 : -1.0;
    return {(-std::numbers::egamma - std::log(std::abs(mu.mu * t))) / kTwoPi,
            0.25 * sign};
}

FormValue reg_form(const TestFunction& g1, const TestFunction& g2, MassScale mu,
                   const FormOptions& opts) {
    if (g1.atoms_only() && g2.atoms_only()) return reg_form_momentum(g1, g2, mu, opts);
    return reg_form_pullback(g1, g2, mu, opts);
}

FormValue reg_form_position(const TestFunction& g1, const TestFunction& g2, MassScale mu,
                            const FormOptions& opts) {
    if (g1.atoms_only() && g2.atoms_only()) {
        // ∬ g1(t) W(t-s) g2(s) = ∫ W(τ) C(τ) dτ with C = correlate(g1, g2)
        const TestFunction C = correlate(g1, g2);
        const double T = C.position_radius(1e-18);
        quad::Options qo = opts.quad;
        qo.breakpoints.push_back(0.0);
        qo.max_panels = std::max(qo.max_panels, 40000);
        qo.throw_on_failure = false;
        auto f = [&](double tau) -> std::complex<double> {
            if (tau == 0.0) return {0.0, 0.0};
            return C(tau) * kernel_W(tau, mu);
        };
        auto r = quad::integrate(f, -T, T, qo);
        FormValue out;
        out.value = r.value;
        out.error_estimate = r.error;
        out.mu_used = mu;
        return out;
    }
    return reg_form_pullback(g1, g2, mu, opts);
}

double imag_form(const TestFunction& g1, const TestFunction& g2, const quad::Options& opts) {
    if (g1.atoms_only() && g2.atoms_only()) {
        const double K = std::max(g1.momentum_radius(1e-16), g2.momentum_radius(1e-16));
        quad::Options qo = opts;
        qo.throw_on_failure = false;
        auto f = [&](double k) -> std::complex<double> {
            return std::imag(std::conj(g1.fourier(k)) * g2.fourier(k)) / k;
        };
        return quad::integrate(f, 0.0, K, qo).value.real() / kTwoPi;
    }
    FormOptions fo;
    fo.quad = opts;
    return reg_form_pullback(g1, g2, MassScale{1.0}, fo).value.imag();
}

double fermi_form(const TestFunction& g1, const TestFunction& g2, const quad::Options& opts) {
    if (g1.atoms_only() && g2.atoms_only()) return integral_of_product(g1, g2);
    quad::Options qo = opts;
    qo.throw_on_failure = false;
    for (double p : g1.singularities()) qo.breakpoints.push_back(p);
    for (double p : g2.singularities()) qo.breakpoints.push_back(p);
    auto f = [&](double t) { return std::complex<double>(g1(t) * g2(t), 0.0); };
    return quad::integrate_line(f, qo).value.real();
}

std::complex<double> commutator_value(const MoverPair& p1, const MoverPair& p2,
                                      const quad::Options& opts) {
    const double im = imag_form(p1.right(), p2.right(), opts) + imag_form(p1.left(), p2.left(), opts);
    return {0.0, 2.0 * im};
}

std::complex<double> commutator_spacetime(const SpacetimeFunction& f1, const SpacetimeFunction& f2,
                                          const quad::Options& opts) {
    // light-cone line densities: A on t+x = σ (convolution), B on t-x = σ (correlation)
    auto densities = [](const SpacetimeFunction& f) {
        TestFunction A, B;
        for (const auto& term : f.terms()) {
            A = A + convolve(term.u, term.v);
            B = B + correlate(term.u, term.v);
        }
        return std::pair{A, B};
    };
    const auto [A1, B1] = densities(f1);
    const auto [A2, B2] = densities(f2);

    auto double_sgn = [&](const TestFunction& F, const TestFunction& G) {
        // ∬ F(σ) sgn(σ-σ') G(σ') = ∫ F(σ) (2 CDF_G(σ) - Z_G) dσ
        const double ZG = G.zero_mode();
        const double T = F.position_radius(1e-18);
        quad::Options qo = opts;
        qo.throw_on_failure = false;
        return quad::integrate_real(
            [&](double s) { return F(s) * (2.0 * cumulative(G, s) - ZG); }, -T, T, qo);
    };

    const double total = double_sgn(A1, A2) + double_sgn(B1, B2);
    return {0.0, -0.5 * total};
}

}  // namespace mqf::forms
