#include "mqf/vertex.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mqf::vertex {

namespace {

constexpr double kBalanceTol = 1e-12;

void check_distinct_times(const std::vector<VertexSpec>& vs) {
    auto check = [](const std::vector<Insertion>& a, const std::vector<Insertion>& b) {
        for (const auto& p : a)
            for (const auto& q : b)
                if (p.time == q.time)
                    throw std::invalid_argument("vertex product: coincident insertion times (W singular)");
    };
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            check(vs[i].right(), vs[j].right());
            check(vs[i].left(), vs[j].left());
        }
}

double total_amplitude(const std::vector<VertexSpec>& vs) {
    double t = 0.0;
    for (const auto& v : vs) t += v.total_right();
    return t;
}

}  // namespace

VertexSpec::VertexSpec(std::vector<Insertion> right, std::vector<Insertion> left, double tol)
    : right_(std::move(right)), left_(std::move(left)) {
    if (std::abs(total_right() - total_left()) > tol)
        throw std::invalid_argument("VertexSpec: Σβ_R != Σβ_L");
}

double VertexSpec::total_right() const {
    double t = 0.0;
    for (const auto& i : right_) t += i.amplitude;
    return t;
}

double VertexSpec::total_left() const {
    double t = 0.0;
    for (const auto& i : left_) t += i.amplitude;
    return t;
}

double omega_vertex(const VertexSpec& v) {
    if (std::abs(v.total_right() - v.total_left()) > kBalanceTol)
        throw std::invalid_argument("omega_vertex: unbalanced spec");
    return std::abs(v.total_right()) <= kBalanceTol ? 1.0 : 0.0;
}

std::complex<double> product_prefactor(const std::vector<VertexSpec>& vs, forms::MassScale mu) {
    check_distinct_times(vs);
    std::complex<double> exponent = 0.0;
    auto accumulate = [&](const std::vector<Insertion>& a, const std::vector<Insertion>& b) {
        for (const auto& p : a)
            for (const auto& q : b)
                exponent += -p.amplitude * q.amplitude * std::conj(forms::kernel_W(p.time - q.time, mu));
    };
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            accumulate(vs[i].right(), vs[j].right());
            accumulate(vs[i].left(), vs[j].left());
        }
    return std::exp(exponent);
}

std::complex<double> product_prefactor_power(const std::vector<VertexSpec>& vs, forms::MassScale mu) {
    check_distinct_times(vs);
    const double scale = mu.mu * std::exp(std::numbers::egamma);
    std::complex<double> result = 1.0;
    auto accumulate = [&](const std::vector<Insertion>& a, const std::vector<Insertion>& b) {
        for (const auto& p : a)
            for (const auto& q : b) {
                const std::complex<double> base(0.0, scale * (p.time - q.time));  // iμe^γ (t_p - t_q)
                result *= std::pow(base, p.amplitude * q.amplitude / (2.0 * std::numbers::pi));
            }
    };
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            accumulate(vs[i].right(), vs[j].right());
            accumulate(vs[i].left(), vs[j].left());
        }
    return result;
}

std::complex<double> omega_vertex_product(const std::vector<VertexSpec>& vs, forms::MassScale mu) {
    if (std::abs(total_amplitude(vs)) > kBalanceTol) return 0.0;
    return product_prefactor(vs, mu);
}

weyl::WeylElement gaussian_regularized_vertex(const VertexSpec& v, double eps, forms::MassScale mu) {
    if (!(eps > 0.0)) throw std::invalid_argument("gaussian_regularized_vertex: eps must be positive");
    TestFunction gr, gl;
    for (const auto& ins : v.right()) gr = gr + TestFunction::gaussian(ins.time, eps, ins.amplitude);
    for (const auto& ins : v.left()) gl = gl + TestFunction::gaussian(ins.time, eps, ins.amplitude);
    MoverPair pair(std::move(gr), std::move(gl));
    const double prefactor = weyl::normal_order_prefactor(pair, mu);
    return weyl::WeylElement::generator(std::move(pair), prefactor);
}

}  // namespace mqf::vertex
