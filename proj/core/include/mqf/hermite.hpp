#pragma once

#include <cstddef>
#include <vector>

namespace mqf::hermite {

// Physicists' Hermite polynomials H_n: H_0 = 1, H_1 = 2x,
// H_{n+1} = 2x H_n - 2n H_{n-1}.  The products H_n(x) e^{-x^2/2} are the
// Fourier eigenfunctions used throughout as the atom basis.

inline double value(int n, double x) {
    if (n <= 0) return 1.0;
    double hm = 1.0, h = 2.0 * x;
    for (int m = 1; m < n; ++m) {
        const double hp = 2.0 * x * h - 2.0 * m * hm;
        hm = h;
        h = hp;
    }
    return h;
}

// sum_n c[n] H_n(x), evaluated with a single recurrence sweep
inline double series(const std::vector<double>& c, double x) {
    if (c.empty()) return 0.0;
    double acc = c[0];
    double hm = 1.0, h = 2.0 * x;
    for (std::size_t n = 1; n < c.size(); ++n) {
        acc += c[n] * h;
        const double hp = 2.0 * x * h - 2.0 * static_cast<double>(n) * hm;
        hm = h;
        h = hp;
    }
    return acc;
}

// H_n(0): zero for odd n, (-1)^m (2m)!/m! for n = 2m
inline double value_at_zero(int n) {
    if (n % 2 != 0) return 0.0;
    double v = 1.0;
    for (int m = 0; m < n / 2; ++m) v *= -2.0 * (2 * m + 1);  // ratio H_{2m+2}(0)/H_{2m}(0)
    return v;
}

// monomial coefficients of H_n (index = power of x)
inline std::vector<double> coefficients(int n) {
    std::vector<double> hm{1.0};
    if (n <= 0) return hm;
    std::vector<double> h{0.0, 2.0};
    for (int m = 1; m < n; ++m) {
        std::vector<double> hp(m + 2, 0.0);
        for (std::size_t j = 0; j < h.size(); ++j) hp[j + 1] += 2.0 * h[j];
        for (std::size_t j = 0; j < hm.size(); ++j) hp[j] -= 2.0 * m * hm[j];
        hm.swap(h);
        h.swap(hp);
    }
    return h;
}

// Hermite-series coefficients -> monomial coefficients
inline std::vector<double> to_monomial(const std::vector<double>& herm) {
    std::vector<double> mono(herm.size(), 0.0);
    for (std::size_t n = 0; n < herm.size(); ++n) {
        if (herm[n] == 0.0) continue;
        const auto hn = coefficients(static_cast<int>(n));
        for (std::size_t j = 0; j < hn.size(); ++j) mono[j] += herm[n] * hn[j];
    }
    return mono;
}

// monomial coefficients -> Hermite-series coefficients, via
// x^m = (m!/2^m) sum_k H_{m-2k} / (k! (m-2k)!)
inline std::vector<double> to_hermite(const std::vector<double>& mono) {
    std::vector<double> herm(mono.size(), 0.0);
    for (std::size_t m = 0; m < mono.size(); ++m) {
        if (mono[m] == 0.0) continue;
        double mfact = 1.0;
        for (std::size_t j = 2; j <= m; ++j) mfact *= static_cast<double>(j);
        double scale = mfact;
        for (std::size_t j = 0; j < m; ++j) scale *= 0.5;
        for (std::size_t k = 0; 2 * k <= m; ++k) {
            const std::size_t n = m - 2 * k;
            double kfact = 1.0;
            for (std::size_t j = 2; j <= k; ++j) kfact *= static_cast<double>(j);
            double nfact = 1.0;
            for (std::size_t j = 2; j <= n; ++j) nfact *= static_cast<double>(j);
            herm[n] += mono[m] * scale / (kfact * nfact);
        }
    }
    return herm;
}

}  // namespace mqf::hermite
