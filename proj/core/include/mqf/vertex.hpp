#pragma once

#include <complex>
#include <vector>

#include "mqf/forms.hpp"
#include "mqf/weyl.hpp"

namespace mqf::vertex {

struct Insertion {
    double time = 0.0;
    double amplitude = 0.0;  // β
};

// delta insertions for right and left movers; Σβ_R = Σβ_L is required
class VertexSpec {
  public:
    VertexSpec() = default;
    VertexSpec(std::vector<Insertion> right, std::vector<Insertion> left, double tol = 1e-12);
    const std::vector<Insertion>& right() const { return right_; }
    const std::vector<Insertion>& left() const { return left_; }
    double total_right() const;
    double total_left() const;

  private:
    std::vector<Insertion> right_{}, left_{};
};

// ω(V) = 1 if Σβ_R = 0 else 0 (threshold 1e-12)
double omega_vertex(const VertexSpec& v);

// Product prefactor for V_1 ... V_n, derived from the Weyl relation with the
// normal ordering and state of this algebra:
//   V_i V_j cross-pair exponent = -β_i β_j conj(W(t_i - t_j))   (per chirality)
// so prefactor = exp( Σ_{i<j} Σ_{p∈V_i, q∈V_j} -β_p β_q conj(W(t_p - t_q)) ).
// Insertion times must be distinct within each chirality across the list.
std::complex<double> product_prefactor(const std::vector<VertexSpec>& vs, forms::MassScale mu);

// the same quantity as a product of principal-branch powers,
//   Π_{i<j} ( i μ e^{γ_E} (t_i - t_j) )^{+β_i β_j / 2π},
// evaluated independently of kernel_W for cross-checking
std::complex<double> product_prefactor_power(const std::vector<VertexSpec>& vs, forms::MassScale mu);

// ω(V_1 ... V_n) = prefactor × [total Σβ_R over all specs = 0]
std::complex<double> omega_vertex_product(const std::vector<VertexSpec>& vs, forms::MassScale mu);

// each δ_t replaced by a unit-integral Gaussian atom of width eps times β;
// returns the normal-ordered Weyl element :e^{iφ(g_R,g_L)}: at scale μ
weyl::WeylElement gaussian_regularized_vertex(const VertexSpec& v, double eps, forms::MassScale mu);

}  // namespace mqf::vertex
