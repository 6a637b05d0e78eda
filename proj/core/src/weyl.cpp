#include "mqf/weyl.hpp"

#include <cmath>
#include <numbers>

namespace mqf::weyl {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCoeffEps = 0.0;  // drop exact zeros only
}  // namespace

WeylElement WeylElement::identity() { return generator(MoverPair{}, 1.0); }

WeylElement WeylElement::generator(MoverPair pair, std::complex<double> coeff) {
    WeylElement e;
    e.add_term(coeff, pair);
    return e;
}

void WeylElement::add_term(std::complex<double> coeff, const MoverPair& pair) {
    if (coeff == std::complex<double>{}) return;
    const std::string key = pair.canonical_key();
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, Term{coeff, pair});
    } else {
        it->second.coeff += coeff;
        if (std::abs(it->second.coeff) <= kCoeffEps) terms_.erase(it);
    }
}

WeylElement WeylElement::operator+(const WeylElement& other) const {
    WeylElement out = *this;
    for (const auto& [key, term] : other.terms_) out.add_term(term.coeff, term.pair);
    return out;
}

WeylElement WeylElement::operator*(std::complex<double> s) const {
    WeylElement out;
    for (const auto& [key, term] : terms_) out.add_term(term.coeff * s, term.pair);
    return out;
}

WeylElement product(const WeylElement& A, const WeylElement& B, const quad::Options& opts) {
    WeylElement out;
    for (const auto& [ka, ta] : A.terms_) {
        for (const auto& [kb, tb] : B.terms_) {
            // phase angle = Im(g_R1|g_R2) + Im(g_L1|g_L2) = commutator_value / 2i
            const double theta = forms::imag_form(ta.pair.right(), tb.pair.right(), opts) +
                                 forms::imag_form(ta.pair.left(), tb.pair.left(), opts);
            const std::complex<double> phase = std::exp(std::complex<double>(0.0, theta));
            out.add_term(ta.coeff * tb.coeff * phase, ta.pair + tb.pair);
        }
    }
    return out;
}

WeylElement adjoint(const WeylElement& A) {
    WeylElement out;
    for (const auto& [key, term] : A.terms_) out.add_term(std::conj(term.coeff), -term.pair);
    return out;
}

StateValue omega(const WeylElement& A, const quad::Options& opts) {
    std::complex<double> total = 0.0;
    for (const auto& [key, term] : A.terms()) {
        const double z = term.pair.zero_mode();
        if (std::abs(z) > kZeroModeThreshold) continue;  // vanishing branch
        auto exponent_part = [&](const TestFunction& g) {
            if (g.empty()) return 0.0;
            const double K = g.momentum_radius(1e-16);
            quad::Options qo = opts;
            qo.throw_on_failure = false;
            auto f = [&](double k) -> std::complex<double> {
                return std::norm(g.fourier(k)) / k;
            };
            return quad::integrate(f, 0.0, K, qo).value.real() / kTwoPi;
        };
        const double expo = exponent_part(term.pair.right()) + exponent_part(term.pair.left());
        total += term.coeff * std::exp(-0.5 * expo);
    }
    return StateValue{total};
}

double normal_order_prefactor(const MoverPair& pair, forms::MassScale mu, const forms::FormOptions& opts) {
    const double r = forms::reg_form(pair.right(), pair.right(), mu, opts).value.real();
    const double l = forms::reg_form(pair.left(), pair.left(), mu, opts).value.real();
    return std::exp(0.5 * r + 0.5 * l);
}

WeylElement normal_order(const WeylElement& A, forms::MassScale mu, const forms::FormOptions& opts) {
    WeylElement out;
    for (const auto& [key, term] : A.terms_)
        out.add_term(term.coeff * normal_order_prefactor(term.pair, mu, opts), term.pair);
    return out;
}

Eigen::MatrixXcd gram_matrix(const std::vector<WeylElement>& elements, const quad::Options& opts) {
    const auto n = static_cast<Eigen::Index>(elements.size());
    Eigen::MatrixXcd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const WeylElement ai = adjoint(elements[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j) {
            M(i, j) = omega(product(ai, elements[static_cast<std::size_t>(j)], opts), opts).value;
        }
    }
    // symmetrize away quadrature noise; the exact matrix is hermitian
    return 0.5 * (M + M.adjoint().eval());
}

double min_eigenvalue(const Eigen::MatrixXcd& hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace mqf::weyl
