#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mqf/forms.hpp"
#include "mqf/testfn.hpp"

namespace mqf::fock {

using OperatorMatrix = Eigen::SparseMatrix<std::complex<double>>;

// discretization of ∫dk on (0,∞): nodes k_i with cell widths Δ_i
struct ModeGrid {
    std::vector<double> momenta;
    std::vector<double> weights;
    // log-midpoint nodes on a geometric subdivision of [kmin, kmax]; all
    // infrared phenomena here are logarithmic, so geometric grids are the default
    static ModeGrid geometric(double kmin, double kmax, int modes);
    void validate() const;
    int size() const { return static_cast<int>(momenta.size()); }
};

struct TruncationSpec {
    int max_occupation = 2;  // N ≥ 1 per bosonic mode
    int zero_mode_dim = 0;   // harmonic-oscillator levels of the (χ,p) factor; 0 = sector picture
};

// σ_R, σ_L with σ̂(0) = 1
struct CompensatingPair {
    TestFunction sigma_R, sigma_L;
    CompensatingPair(TestFunction r, TestFunction l, double tol = 1e-8);
    const TestFunction& get(bool left) const { return left ? sigma_L : sigma_R; }
};

struct SectorLabel {
    double chi = 0.0;  // superselection parameter χ₁
};

enum class Chirality { right, left };

struct SystemOptions {
    bool left_movers = true;
    bool fermions = false;
};

// Truncated tensor-product realization of the mode algebra.  Continuum
// normalization: a_i = sqrt(2π k_i/Δ_i) A_i with [A_i, A_i†] = 1, so that
// Σ_i (Δ_i/2π) a_i† a_i = Σ_i k_i A_i† A_i discretizes H_R = ∫ dk/2π a†a, and
// b_i = sqrt(2π/Δ_i) B_i with {B_i, B_i†} = 1 (Jordan–Wigner; modes ordered by
// increasing k, right before left).  CCR identities hold exactly on the safe
// subspace (occupation ≤ N-1 per mode), CAR identities hold exactly everywhere.
class FockSystem {
  public:
    FockSystem(ModeGrid grid, TruncationSpec trunc, SystemOptions opts = {});

    const ModeGrid& grid() const { return grid_; }
    const TruncationSpec& truncation() const { return trunc_; }
    Eigen::Index dimension() const { return dim_; }
    int modes() const { return grid_.size(); }
    bool has_left() const { return opts_.left_movers; }
    bool has_fermions() const { return opts_.fermions; }
    int zero_mode_dim() const { return trunc_.zero_mode_dim; }

    OperatorMatrix identity() const;
    OperatorMatrix lower(Chirality x, int mode) const;  // a_i
    OperatorMatrix raise(Chirality x, int mode) const;  // a_i†
    OperatorMatrix number(Chirality x, int mode) const; // A_i† A_i
    OperatorMatrix fermi_lower(Chirality x, int mode) const;  // b_i
    OperatorMatrix fermi_raise(Chirality x, int mode) const;  // b_i†
    OperatorMatrix chi_op() const;
    OperatorMatrix p_op() const;

    // projector onto occupation ≤ N - margin per bosonic mode (zero-mode
    // factor: level ≤ dim - 1 - margin); identities are exact below the edge
    OperatorMatrix safe_projector(int margin = 1) const;

    OperatorMatrix hamiltonian_boson(Chirality x) const;    // Σ k_i A†A
    OperatorMatrix hamiltonian_fermion(Chirality x) const;  // Σ k_i B†B

    // discretization of ∫ dk/2π (a† + iχσ̂*)(a - iχσ̂) summed over chiralities;
    // built as Σ (Δ_i/2π) D†D, hence positive semidefinite by construction
    OperatorMatrix sector_hamiltonian(SectorLabel chi, const CompensatingPair& sigma) const;

    // displacement unitary with U a_i U⁻¹ = a_i - iχ ξ̂(k_i); ξ̂(0) must vanish
    OperatorMatrix gauge_unitary(const TestFunction& xi_R, const TestFunction& xi_L, SectorLabel chi,
                                 double zero_mode_tol = 1e-8) const;

    // the smeared field; pairs with ĝ(0) ≠ 0 require the zero-mode factor
    OperatorMatrix field_operator(const MoverPair& p, const CompensatingPair& sigma,
                                  SectorLabel chi) const;

    // annihilation/creation smears (λ₋(g), λ₊(g)); the Majorana field is their sum
    std::pair<OperatorMatrix, OperatorMatrix> dirac_smeared(const TestFunction& g, Chirality x) const;

    // Q_X = Σ (Δ_i/2π)(a_σ† b + a_σ b†)
    OperatorMatrix susy_charge(Chirality x, const CompensatingPair& sigma, SectorLabel chi) const;

    // the c-number V with [φ(p1), φ(p2)] = i V on the safe subspace
    double field_commutator_scalar(const MoverPair& p1, const MoverPair& p2,
                                   const CompensatingPair& sigma) const;
    // the c-number with {λ(g1), λ(g2)} = c · Id (Majorana smears)
    double fermi_anticommutator_scalar(const TestFunction& g1, const TestFunction& g2,
                                       Chirality x) const;

    Eigen::VectorXcd vacuum() const;

  private:
    struct Factor {
        enum class Kind { boson, zero_mode, fermion } kind;
        Chirality chirality = Chirality::right;
        int mode = 0;
        int dim = 0;
    };

    OperatorMatrix at_factor(std::size_t slot, const Eigen::MatrixXcd& local, bool jw_string) const;
    std::size_t boson_slot(Chirality x, int mode) const;
    std::size_t fermion_slot(Chirality x, int mode) const;
    std::size_t zero_slot() const;
    OperatorMatrix chi_tilde(SectorLabel chi) const;  // χ·Id in the sector picture, χ_op otherwise

    ModeGrid grid_;
    TruncationSpec trunc_;
    SystemOptions opts_;
    std::vector<Factor> factors_;
    Eigen::Index dim_ = 1;
};

// C = exp(-(χ²/2) ∫_{kmin}^∞ dk/(2πk) (|σ̂_R|² + |σ̂_L|²))
double coherent_overlap(double chi, const CompensatingPair& sigma, double kmin,
                        const quad::Options& opts = {});

double min_eigenvalue(const OperatorMatrix& hermitian);
double frobenius(const OperatorMatrix& m);
double safe_residual(const OperatorMatrix& x, const OperatorMatrix& projector);  // ‖P X P‖_F
bool is_hermitian(const OperatorMatrix& m, double tol = 0.0);
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

}  // namespace mqf::fock
