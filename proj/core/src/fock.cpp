#include "mqf/fock.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace mqf::fock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Eigen::Index kMaxDimension = 1 << 22;
constexpr Eigen::Index kMaxDenseDim = 4096;

using Complex = std::complex<double>;

Eigen::MatrixXcd boson_lowering(int dim) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

Eigen::MatrixXcd fermion_lowering() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Eigen::MatrixXcd jw_phase() {
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(2, 2);
    z(1, 1) = -1.0;
    return z;
}

OperatorMatrix sparse_identity(Eigen::Index n) {
    OperatorMatrix id(n, n);
    id.setIdentity();
    return id;
}

OperatorMatrix to_sparse(const Eigen::MatrixXcd& m) {
    return m.sparseView(1.0, 0.0);
}

}  // namespace

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
    OperatorMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (OperatorMatrix::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (OperatorMatrix::InnerIterator ib(b, kb); ib; ++ib)
                    trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                       ia.value() * ib.value());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

ModeGrid ModeGrid::geometric(double kmin, double kmax, int modes) {
    if (!(kmin > 0.0) || !(kmax > kmin) || modes < 1)
        throw std::invalid_argument("ModeGrid::geometric: need 0 < kmin < kmax, modes >= 1");
    ModeGrid g;
    const double r = std::pow(kmax / kmin, 1.0 / modes);
    double edge = kmin;
    for (int i = 0; i < modes; ++i) {
        const double next = (i + 1 == modes) ? kmax : kmin * std::pow(r, i + 1);
        g.momenta.push_back(std::sqrt(edge * next));
        g.weights.push_back(next - edge);
        edge = next;
    }
    return g;
}

void ModeGrid::validate() const {
    if (momenta.size() != weights.size()) throw std::invalid_argument("ModeGrid: size mismatch");
    double prev = 0.0;
    for (std::size_t i = 0; i < momenta.size(); ++i) {
        if (!(momenta[i] > prev)) throw std::invalid_argument("ModeGrid: momenta must be increasing and positive");
        if (!(weights[i] > 0.0)) throw std::invalid_argument("ModeGrid: weights must be positive");
        prev = momenta[i];
    }
}

CompensatingPair::CompensatingPair(TestFunction r, TestFunction l, double tol)
    : sigma_R(std::move(r)), sigma_L(std::move(l)) {
    if (std::abs(sigma_R.zero_mode() - 1.0) > tol || std::abs(sigma_L.zero_mode() - 1.0) > tol)
        throw std::invalid_argument("CompensatingPair: requires σ̂(0) = 1");
}

FockSystem::FockSystem(ModeGrid grid, TruncationSpec trunc, SystemOptions opts)
    : grid_(std::move(grid)), trunc_(trunc), opts_(opts) {
    grid_.validate();
    if (trunc_.max_occupation < 1) throw std::invalid_argument("TruncationSpec: max_occupation >= 1");
    const int M = grid_.size();
    const int bdim = trunc_.max_occupation + 1;
    for (int i = 0; i < M; ++i)
        factors_.push_back({Factor::Kind::boson, Chirality::right, i, bdim});
    if (opts_.left_movers)
        for (int i = 0; i < M; ++i) factors_.push_back({Factor::Kind::boson, Chirality::left, i, bdim});
    if (trunc_.zero_mode_dim > 0)
        factors_.push_back({Factor::Kind::zero_mode, Chirality::right, 0, trunc_.zero_mode_dim});
    if (opts_.fermions) {
        for (int i = 0; i < M; ++i) factors_.push_back({Factor::Kind::fermion, Chirality::right, i, 2});
        if (opts_.left_movers)
            for (int i = 0; i < M; ++i) factors_.push_back({Factor::Kind::fermion, Chirality::left, i, 2});
    }
    dim_ = 1;
    for (const auto& f : factors_) {
        dim_ *= f.dim;
        if (dim_ > kMaxDimension) throw std::invalid_argument("FockSystem: dimension overflow");
    }
}

std::size_t FockSystem::boson_slot(Chirality x, int mode) const {
    if (mode < 0 || mode >= modes()) throw std::out_of_range("FockSystem: mode index");
    if (x == Chirality::left && !opts_.left_movers)
        throw std::invalid_argument("FockSystem: left movers not built");
    return static_cast<std::size_t>(mode) + (x == Chirality::left ? static_cast<std::size_t>(modes()) : 0);
}

std::size_t FockSystem::fermion_slot(Chirality x, int mode) const {
    if (!opts_.fermions) throw std::invalid_argument("FockSystem: fermions not built");
    if (mode < 0 || mode >= modes()) throw std::out_of_range("FockSystem: mode index");
    std::size_t base = static_cast<std::size_t>(modes()) * (opts_.left_movers ? 2 : 1);
    if (trunc_.zero_mode_dim > 0) base += 1;
    if (x == Chirality::left) base += static_cast<std::size_t>(modes());
    return base + static_cast<std::size_t>(mode);
}

std::size_t FockSystem::zero_slot() const {
    if (trunc_.zero_mode_dim <= 0) throw std::invalid_argument("FockSystem: no zero-mode factor");
    return static_cast<std::size_t>(modes()) * (opts_.left_movers ? 2 : 1);
}

OperatorMatrix FockSystem::at_factor(std::size_t slot, const Eigen::MatrixXcd& local,
                                     bool jw_string) const {
    OperatorMatrix acc = sparse_identity(1);
    const Eigen::MatrixXcd z = jw_phase();
    for (std::size_t s = 0; s < factors_.size(); ++s) {
        OperatorMatrix piece;
        if (s == slot) {
            piece = to_sparse(local);
        } else if (jw_string && s < slot && factors_[s].kind == Factor::Kind::fermion) {
            piece = to_sparse(z);
        } else {
            piece = sparse_identity(factors_[s].dim);
        }
        acc = kron(acc, piece);
    }
    return acc;
}

OperatorMatrix FockSystem::identity() const { return sparse_identity(dim_); }

OperatorMatrix FockSystem::lower(Chirality x, int mode) const {
    const double scale = std::sqrt(kTwoPi * grid_.momenta[mode] / grid_.weights[mode]);
    return at_factor(boson_slot(x, mode),
                     scale * boson_lowering(trunc_.max_occupation + 1), false);
}

OperatorMatrix FockSystem::raise(Chirality x, int mode) const {
    return OperatorMatrix(lower(x, mode).adjoint());
}

OperatorMatrix FockSystem::number(Chirality x, int mode) const {
    const Eigen::MatrixXcd A = boson_lowering(trunc_.max_occupation + 1);
    return at_factor(boson_slot(x, mode), Eigen::MatrixXcd(A.adjoint() * A), false);
}

OperatorMatrix FockSystem::fermi_lower(Chirality x, int mode) const {
    const double scale = std::sqrt(kTwoPi / grid_.weights[mode]);
    return at_factor(fermion_slot(x, mode), scale * fermion_lowering(), true);
}

OperatorMatrix FockSystem::fermi_raise(Chirality x, int mode) const {
    return OperatorMatrix(fermi_lower(x, mode).adjoint());
}

OperatorMatrix FockSystem::chi_op() const {
    const Eigen::MatrixXcd o = boson_lowering(trunc_.zero_mode_dim);
    return at_factor(zero_slot(), Eigen::MatrixXcd((o + o.adjoint()) / std::numbers::sqrt2), false);
}

OperatorMatrix FockSystem::p_op() const {
    const Eigen::MatrixXcd o = boson_lowering(trunc_.zero_mode_dim);
    const Complex i{0.0, 1.0};
    return at_factor(zero_slot(), Eigen::MatrixXcd((o - o.adjoint()) / (i * std::numbers::sqrt2)), false);
}

OperatorMatrix FockSystem::safe_projector(int margin) const {
    OperatorMatrix acc = sparse_identity(1);
    for (const auto& f : factors_) {
        Eigen::MatrixXcd local = Eigen::MatrixXcd::Identity(f.dim, f.dim);
        if (f.kind == Factor::Kind::boson || f.kind == Factor::Kind::zero_mode) {
            for (int n = std::max(0, f.dim - margin); n < f.dim; ++n) local(n, n) = 0.0;
        }
        acc = kron(acc, to_sparse(local));
    }
    return acc;
}

OperatorMatrix FockSystem::hamiltonian_boson(Chirality x) const {
    OperatorMatrix h(dim_, dim_);
    for (int i = 0; i < modes(); ++i) h = h + OperatorMatrix(grid_.momenta[i] * number(x, i));
    return h;
}

OperatorMatrix FockSystem::hamiltonian_fermion(Chirality x) const {
    OperatorMatrix h(dim_, dim_);
    for (int i = 0; i < modes(); ++i) {
        const OperatorMatrix b = fermi_lower(x, i);
        const double norm = grid_.weights[i] / kTwoPi;  // b†b = (2π/Δ) B†B
        h = h + OperatorMatrix(grid_.momenta[i] * norm * OperatorMatrix(b.adjoint() * b));
    }
    return h;
}

OperatorMatrix FockSystem::chi_tilde(SectorLabel chi) const {
    if (trunc_.zero_mode_dim > 0) return chi_op();
    return OperatorMatrix(chi.chi * identity());
}

OperatorMatrix FockSystem::sector_hamiltonian(SectorLabel chi, const CompensatingPair& sigma) const {
    OperatorMatrix h(dim_, dim_);
    const OperatorMatrix id = identity();
    const Complex i{0.0, 1.0};
    for (int side = 0; side < (opts_.left_movers ? 2 : 1); ++side) {
        const Chirality x = side == 0 ? Chirality::right : Chirality::left;
        const TestFunction& s = sigma.get(side == 1);
        for (int m = 0; m < modes(); ++m) {
            const Complex sk = s.fourier(grid_.momenta[m]);
            const OperatorMatrix D = OperatorMatrix(lower(x, m) - OperatorMatrix(i * chi.chi * sk * id));
            h = h + OperatorMatrix((grid_.weights[m] / kTwoPi) * OperatorMatrix(D.adjoint() * D));
        }
    }
    return h;
}

OperatorMatrix FockSystem::gauge_unitary(const TestFunction& xi_R, const TestFunction& xi_L,
                                         SectorLabel chi, double zero_mode_tol) const {
    if (std::abs(xi_R.zero_mode()) > zero_mode_tol || std::abs(xi_L.zero_mode()) > zero_mode_tol)
        throw std::invalid_argument("gauge_unitary: ξ̂(0) must vanish");
    if (dim_ > kMaxDenseDim) throw std::invalid_argument("gauge_unitary: dimension too large for exp");

    const Complex i{0.0, 1.0};
    OperatorMatrix X(dim_, dim_);
    const OperatorMatrix chi_t = chi_tilde(chi);
    for (int side = 0; side < (opts_.left_movers ? 2 : 1); ++side) {
        const Chirality x = side == 0 ? Chirality::right : Chirality::left;
        const TestFunction& xi = side == 0 ? xi_R : xi_L;
        for (int m = 0; m < modes(); ++m) {
            const Complex xk = xi.fourier(grid_.momenta[m]);
            const double w = grid_.weights[m] / (kTwoPi * grid_.momenta[m]);
            X = X + OperatorMatrix(w * OperatorMatrix(OperatorMatrix(i * std::conj(xk) * OperatorMatrix(chi_t * lower(x, m))) +
                                                      OperatorMatrix(i * xk * OperatorMatrix(chi_t * raise(x, m)))));
        }
    }
    // X is antihermitian: exponentiate through the hermitian matrix -iX
    Eigen::MatrixXcd H = Eigen::MatrixXcd(X) * Complex(0.0, -1.0);
    H = 0.5 * (H + H.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index n = 0; n < phases.size(); ++n)
        phases(n) = std::exp(Complex(0.0, es.eigenvalues()(n)));
    Eigen::MatrixXcd U = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return to_sparse(U);
}

OperatorMatrix FockSystem::field_operator(const MoverPair& p, const CompensatingPair& sigma,
                                          SectorLabel chi) const {
    const double z = p.zero_mode();
    const bool needs_zero = std::abs(z) > 1e-10;
    if (needs_zero && trunc_.zero_mode_dim <= 0)
        throw std::invalid_argument(
            "field_operator: pair has nonzero zero mode; only Weyl operators exist in the sector "
            "picture (zero_mode_dim > 0 required)");

    const Complex i{0.0, 1.0};
    const OperatorMatrix chi_t = chi_tilde(chi);
    OperatorMatrix M(dim_, dim_);
    for (int side = 0; side < (opts_.left_movers ? 2 : 1); ++side) {
        const Chirality x = side == 0 ? Chirality::right : Chirality::left;
        const TestFunction& g = side == 0 ? p.right() : p.left();
        const TestFunction& s = sigma.get(side == 1);
        for (int m = 0; m < modes(); ++m) {
            const double k = grid_.momenta[m];
            const Complex ck = g.fourier(k) - z * s.fourier(k);
            if (ck == Complex{}) continue;
            const double w = grid_.weights[m] / (kTwoPi * k);
            // a_σ† = a† + i σ̂* χ̃
            const OperatorMatrix a_sigma_dag =
                OperatorMatrix(raise(x, m) + OperatorMatrix(i * std::conj(s.fourier(k)) * chi_t));
            M = M + OperatorMatrix((w * ck) * a_sigma_dag);
        }
    }
    OperatorMatrix phi = OperatorMatrix(M + OperatorMatrix(M.adjoint()));
    if (needs_zero) phi = phi + OperatorMatrix(z * p_op());
    return phi;
}

std::pair<OperatorMatrix, OperatorMatrix> FockSystem::dirac_smeared(const TestFunction& g,
                                                                    Chirality x) const {
    OperatorMatrix minus(dim_, dim_), plus(dim_, dim_);
    for (int m = 0; m < modes(); ++m) {
        const Complex gk = g.fourier(grid_.momenta[m]);
        const double w = grid_.weights[m] / kTwoPi;
        minus = minus + OperatorMatrix((w * std::conj(gk)) * fermi_lower(x, m));
        plus = plus + OperatorMatrix((w * gk) * fermi_raise(x, m));
    }
    return {minus, plus};
}

OperatorMatrix FockSystem::susy_charge(Chirality x, const CompensatingPair& sigma,
                                       SectorLabel chi) const {
    const Complex i{0.0, 1.0};
    const OperatorMatrix chi_t = chi_tilde(chi);
    const TestFunction& s = sigma.get(x == Chirality::left);
    OperatorMatrix q(dim_, dim_);
    for (int m = 0; m < modes(); ++m) {
        const Complex sk = s.fourier(grid_.momenta[m]);
        const OperatorMatrix a_sigma = OperatorMatrix(lower(x, m) - OperatorMatrix(i * sk * chi_t));
        const double w = grid_.weights[m] / kTwoPi;
        q = q + OperatorMatrix(w * OperatorMatrix(OperatorMatrix(OperatorMatrix(a_sigma.adjoint()) * fermi_lower(x, m)) +
                                                  OperatorMatrix(a_sigma * fermi_raise(x, m))));
    }
    return q;
}

double FockSystem::field_commutator_scalar(const MoverPair& p1, const MoverPair& p2,
                                           const CompensatingPair& sigma) const {
    const double z1 = p1.zero_mode(), z2 = p2.zero_mode();
    double v = 0.0;
    double K1 = 0.0, K2 = 0.0;  // χ_op coefficients (zero-mode picture)
    for (int side = 0; side < (opts_.left_movers ? 2 : 1); ++side) {
        const TestFunction& g1 = side == 0 ? p1.right() : p1.left();
        const TestFunction& g2 = side == 0 ? p2.right() : p2.left();
        const TestFunction& s = sigma.get(side == 1);
        for (int m = 0; m < modes(); ++m) {
            const double k = grid_.momenta[m];
            const double w = grid_.weights[m] / (kTwoPi * k);
            const Complex sk = s.fourier(k);
            const Complex c1 = g1.fourier(k) - z1 * sk;
            const Complex c2 = g2.fourier(k) - z2 * sk;
            v += 2.0 * w * std::imag(std::conj(c1) * c2);
            K1 += -2.0 * w * std::imag(c1 * std::conj(sk));
            K2 += -2.0 * w * std::imag(c2 * std::conj(sk));
        }
    }
    v += K1 * z2 - K2 * z1;  // [K1 χ + z1 p, K2 χ + z2 p] = i (K1 z2 - K2 z1)
    return v;
}

double FockSystem::fermi_anticommutator_scalar(const TestFunction& g1, const TestFunction& g2,
                                               Chirality) const {
    double v = 0.0;
    for (int m = 0; m < modes(); ++m) {
        const Complex h = std::conj(g1.fourier(grid_.momenta[m])) * g2.fourier(grid_.momenta[m]);
        v += (grid_.weights[m] / kTwoPi) * 2.0 * h.real();
    }
    return v;
}

Eigen::VectorXcd FockSystem::vacuum() const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim_);
    v(0) = 1.0;
    return v;
}

double coherent_overlap(double chi, const CompensatingPair& sigma, double kmin,
                        const quad::Options& opts) {
    if (!(kmin > 0.0)) throw std::invalid_argument("coherent_overlap: kmin must be positive");
    if (chi == 0.0) return 1.0;
    const double K = std::max(sigma.sigma_R.momentum_radius(1e-16), sigma.sigma_L.momentum_radius(1e-16));
    quad::Options qo = opts;
    for (double b = kmin * 10; b < 1.0; b *= 10.0) qo.breakpoints.push_back(b);
    auto f = [&](double k) -> std::complex<double> {
        return (std::norm(sigma.sigma_R.fourier(k)) + std::norm(sigma.sigma_L.fourier(k))) / k;
    };
    const double integral = quad::integrate(f, kmin, K, qo).value.real() / kTwoPi;
    return std::exp(-0.5 * chi * chi * integral);
}

double min_eigenvalue(const OperatorMatrix& hermitian) {
    if (hermitian.rows() > kMaxDenseDim) throw std::invalid_argument("min_eigenvalue: matrix too large");
    Eigen::MatrixXcd dense(hermitian);
    dense = 0.5 * (dense + dense.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double frobenius(const OperatorMatrix& m) {
    double s = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (OperatorMatrix::InnerIterator it(m, k); it; ++it) s += std::norm(it.value());
    return std::sqrt(s);
}

double safe_residual(const OperatorMatrix& x, const OperatorMatrix& projector) {
    return frobenius(OperatorMatrix(projector * OperatorMatrix(x * projector)));
}

bool is_hermitian(const OperatorMatrix& m, double tol) {
    return frobenius(OperatorMatrix(m - OperatorMatrix(m.adjoint()))) <= tol;
}

}  // namespace mqf::fock
