#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mqf/forms.hpp"
#include "mqf/testfn.hpp"

namespace mqf::weyl {

// |ĝ(0)| above this decides the vanishing branch of the state; chosen far
// above quadrature noise and far below any intentional nonzero zero mode
inline constexpr double kZeroModeThreshold = 1e-8;

struct StateValue {
    std::complex<double> value{};
};

// finite complex combination of Weyl generators e^{iφ(g_R,g_L)}; generators
// are identified by the canonical serialized form of their pair
class WeylElement {
  public:
    struct Term {
        std::complex<double> coeff{};
        MoverPair pair{};
    };

    WeylElement() = default;

    static WeylElement identity();
    static WeylElement generator(MoverPair pair, std::complex<double> coeff = 1.0);

    std::size_t size() const { return terms_.size(); }
    const std::map<std::string, Term>& terms() const { return terms_; }

    WeylElement operator+(const WeylElement& other) const;
    WeylElement operator*(std::complex<double> s) const;

  private:
    void add_term(std::complex<double> coeff, const MoverPair& pair);
    std::map<std::string, Term> terms_{};

    friend WeylElement product(const WeylElement&, const WeylElement&, const quad::Options&);
    friend WeylElement adjoint(const WeylElement&);
    friend WeylElement normal_order(const WeylElement&, forms::MassScale, const forms::FormOptions&);
};

// bilinear extension of
//   e^{iφ(g1)} e^{iφ(g2)} = e^{i Im(g_R1|g_R2) + i Im(g_L1|g_L2)} e^{iφ(g1+g2)}
WeylElement product(const WeylElement& A, const WeylElement& B, const quad::Options& opts = {});
inline WeylElement operator*(const WeylElement& A, const WeylElement& B) { return product(A, B); }

// (e^{iφ(g)})† = e^{iφ(-g)} with conjugated coefficients
WeylElement adjoint(const WeylElement& A);

// quasi-free state: ω(e^{iφ(g)}) = exp(-½ ∫ dk/(2πk) (|ĝ_R|² + |ĝ_L|²)) for
// ĝ(0) = 0 (plain convergent integral), and 0 otherwise
StateValue omega(const WeylElement& A, const quad::Options& opts = {});

// :e^{iφ(g)}: = e^{½(g_R|g_R)+½(g_L|g_L)} e^{iφ(g)}, with the regularized form
// at μ (finite also for ĝ(0) ≠ 0)
WeylElement normal_order(const WeylElement& A, forms::MassScale mu, const forms::FormOptions& opts = {});
double normal_order_prefactor(const MoverPair& pair, forms::MassScale mu,
                              const forms::FormOptions& opts = {});

// M_ij = ω(W_i† W_j); hermitian and positive semidefinite for a state
Eigen::MatrixXcd gram_matrix(const std::vector<WeylElement>& elements, const quad::Options& opts = {});
double min_eigenvalue(const Eigen::MatrixXcd& hermitian);

}  // namespace mqf::weyl
