#include "mqf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace mqf::quad {

namespace {

// QUADPACK dqk15 nodes and weights (positive half; node 0 listed first)
constexpr double kXgk[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
constexpr double kWgk[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
// embedded 7-point Gauss weights, indexed by the even Kronrod nodes
constexpr double kWg[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870};

struct Panel {
    double a, b;
    std::complex<double> value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const Integrand& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);

    const std::complex<double> f0 = f(mid);
    std::complex<double> k15 = kWgk[0] * f0;
    std::complex<double> g7 = kWg[0] * f0;
    double resabs = kWgk[0] * std::abs(f0);

    for (int i = 1; i < 8; ++i) {
        const double dx = hl * kXgk[i];
        const std::complex<double> fp = f(mid + dx);
        const std::complex<double> fm = f(mid - dx);
        k15 += kWgk[i] * (fp + fm);
        resabs += kWgk[i] * (std::abs(fp) + std::abs(fm));
        if (i % 2 == 0) g7 += kWg[i / 2] * (fp + fm);
    }
    k15 *= hl;
    g7 *= hl;
    resabs *= std::abs(hl);

    const double diff = std::abs(k15 - g7);
    double err = diff;
    if (diff > 0.0) {
        const double scaled = std::pow(200.0 * diff, 1.5);
        if (scaled < diff) err = scaled;
    }
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
    return Panel{a, b, k15, err};
}

}  // namespace

Result gk15(const Integrand& f, double a, double b) {
    const Panel p = evaluate_panel(f, a, b);
    return Result{p.value, p.error, 1};
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
    if (std::isinf(a) || std::isinf(b)) {
        // rational map u in (-1,1) -> t = u/(1-u^2); restrict to the requested range
        auto mapped = [&f](double u) {
            const double d = 1.0 - u * u;
            const double t = u / d;
            const double jac = (1.0 + u * u) / (d * d);
            return f(t) * jac;
        };
        auto to_u = [](double t) {
            if (std::isinf(t)) return t > 0 ? 1.0 : -1.0;
            // invert t = u/(1-u^2): u = (sqrt(1+4t^2)-1)/(2t)
            if (t == 0.0) return 0.0;
            return (std::sqrt(1.0 + 4.0 * t * t) - 1.0) / (2.0 * t);
        };
        Options mapped_opts = opts;
        mapped_opts.breakpoints.clear();
        for (double bp : opts.breakpoints) mapped_opts.breakpoints.push_back(to_u(bp));
        return integrate(mapped, to_u(a), to_u(b), mapped_opts);
    }

    if (a == b) return Result{0.0, 0.0, 0};

    std::vector<double> bounds{a};
    std::vector<double> cuts = opts.breakpoints;
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts)
        if (c > a && c < b && c != bounds.back()) bounds.push_back(c);
    bounds.push_back(b);

    std::priority_queue<Panel> queue;
    std::complex<double> total = 0.0;
    double total_err = 0.0;
    int panels = 0;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        Panel p = evaluate_panel(f, bounds[i], bounds[i + 1]);
        total += p.value;
        total_err += p.error;
        ++panels;
        queue.push(p);
    }

    auto tolerance = [&](const std::complex<double>& v) {
        return std::max(opts.abs_tol, opts.rel_tol * std::abs(v));
    };

    while (total_err > tolerance(total) && panels < opts.max_panels && !queue.empty()) {
        Panel worst = queue.top();
        queue.pop();
        const double w = worst.b - worst.a;
        const double mid = 0.5 * (worst.a + worst.b);
        if (w <= std::abs(mid) * 1e-15 + 1e-305) {  // cannot refine further
            total_err = std::max(total_err, worst.error);
            continue;
        }
        Panel left = evaluate_panel(f, worst.a, mid);
        Panel right = evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        ++panels;
        queue.push(left);
        queue.push(right);
    }

    if (total_err > tolerance(total) && opts.throw_on_failure)
        throw QuadratureError(total_err, tolerance(total));
    return Result{total, total_err, panels};
}

Result integrate_line(const Integrand& f, const Options& opts) {
    constexpr double kHalfPi = 1.5707963267948966;
    auto mapped = [&f](double th) {
        const double c = std::cos(th);
        return f(std::tan(th)) / (c * c);
    };
    Options mapped_opts = opts;
    mapped_opts.breakpoints.clear();
    for (double bp : opts.breakpoints) mapped_opts.breakpoints.push_back(std::atan(bp));
    return integrate(mapped, -kHalfPi, kHalfPi, mapped_opts);
}

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      const Options& opts) {
    auto wrapped = [&f](double t) { return std::complex<double>(f(t), 0.0); };
    return integrate(wrapped, a, b, opts).value.real();
}

}  // namespace mqf::quad
