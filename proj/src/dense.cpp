#include "qcmc/dense.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <bit>
#include <list>
#include <mutex>

namespace qcmc {

namespace {

constexpr int kDenseLimit = 14;

void guard_dense(int n) {
    if (n > kDenseLimit)
        throw ResourceError("dense operator construction limited to " + std::to_string(kDenseLimit) +
                            " qubits, got " + std::to_string(n));
}

cplx pauli_phase(const PauliString& p, std::uint64_t b) {
    static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx base = i_pow[std::popcount(p.y_mask()) & 3];
    return (std::popcount(b & p.z_mask()) & 1) ? -base : base;
}

}  // namespace

Matrix to_dense(const PauliString& p) {
    guard_dense(p.n_qubits());
    const std::size_t dim = std::size_t{1} << p.n_qubits();
    Matrix m = Matrix::Zero(dim, dim);
    const std::uint64_t x = p.x_mask();
    for (std::size_t b = 0; b < dim; ++b) m(b ^ x, b) = pauli_phase(p, b);
    return m;
}

Matrix to_dense(const Hamiltonian& h) {
    guard_dense(h.n_qubits());
    const std::size_t dim = std::size_t{1} << h.n_qubits();
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& t : h.terms()) {
        const std::uint64_t x = t.string.x_mask();
        for (std::size_t b = 0; b < dim; ++b) m(b ^ x, b) += t.coeff * pauli_phase(t.string, b);
    }
    return m;
}

std::shared_ptr<const HamiltonianEigen> dense_eigen_cached(const Hamiltonian& h) {
    guard_dense(h.n_qubits());
    static std::mutex mutex;
    static std::list<std::pair<std::uint64_t, std::shared_ptr<const HamiltonianEigen>>> cache;  // MRU front
    {
        std::lock_guard<std::mutex> lock(mutex);
        for (auto it = cache.begin(); it != cache.end(); ++it) {
            if (it->first == h.content_hash()) {
                auto entry = *it;
                cache.erase(it);
                cache.push_front(entry);
                return entry.second;
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(to_dense(h));
    if (solver.info() != Eigen::Success) throw ComputeError("dense eigendecomposition failed");
    auto entry = std::make_shared<HamiltonianEigen>();
    entry->values = solver.eigenvalues();
    entry->vectors = solver.eigenvectors();
    {
        std::lock_guard<std::mutex> lock(mutex);
        cache.emplace_front(h.content_hash(), entry);
        while (cache.size() > 4) cache.pop_back();
    }
    return entry;
}

double spectral_norm(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

Vector to_vector(const StateVector& psi) {
    Vector v(psi.dim());
    const auto a = psi.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) v(i) = a[i];
    if (psi.log_scale() != 0.0) v *= std::exp(psi.log_scale());
    return v;
}

StateVector to_state(int n_qubits, const Vector& v, bool normalised) {
    std::vector<cplx> a(v.data(), v.data() + v.size());
    return StateVector(n_qubits, std::move(a), normalised);
}

KrylovSpace::KrylovSpace(const Hamiltonian& h, const StateVector& psi, int max_dim)
    : n_qubits_(psi.n_qubits()), psi_norm_(psi.norm()), psi_log_scale_(psi.log_scale()) {
    if (h.n_qubits() != psi.n_qubits()) throw ValidationError("KrylovSpace: dimension mismatch");
    if (psi_norm_ == 0.0) throw ValidationError("KrylovSpace: zero state");
    const std::size_t dim = psi.dim();
    const int m_cap = static_cast<int>(std::min<std::size_t>(dim, max_dim));

    std::vector<double> alpha, beta;
    basis_.reserve(m_cap);
    std::vector<cplx> v(psi.amplitudes().begin(), psi.amplitudes().end());
    for (auto& x : v) x *= 1.0 / psi_norm_;
    basis_.push_back(std::move(v));

    std::vector<cplx> w(dim);
    for (int k = 0; k < m_cap; ++k) {
        // w = H basis[k]
        std::fill(w.begin(), w.end(), cplx{0.0, 0.0});
        const auto& cur = basis_.back();
        for (const auto& t : h.terms()) {
            const std::uint64_t x = t.string.x_mask();
            for (std::size_t b = 0; b < dim; ++b)
                w[b ^ x] += t.coeff * (pauli_phase(t.string, b) * cur[b]);
        }
        cplx a{0, 0};
        for (std::size_t i = 0; i < dim; ++i) a += std::conj(cur[i]) * w[i];
        alpha.push_back(a.real());
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis_) {
                cplx c{0, 0};
                for (std::size_t i = 0; i < dim; ++i) c += std::conj(b[i]) * w[i];
                for (std::size_t i = 0; i < dim; ++i) w[i] -= c * b[i];
            }
        }
        double nb = 0.0;
        for (const auto& x : w) nb += std::norm(x);
        nb = std::sqrt(nb);
        if (nb < 1e-12 * std::max(1.0, h.h_tot()) || basis_.size() == dim) {
            exact_ = true;  // invariant subspace: results are exact at any z
            break;
        }
        beta.push_back(nb);
        std::vector<cplx> next = w;
        for (auto& x : next) x *= 1.0 / nb;
        basis_.push_back(std::move(next));
    }

    dim_ = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < dim_) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri);
    ritz_values_ = solver.eigenvalues();
    ritz_vectors_ = solver.eigenvectors();
}

StateVector KrylovSpace::evolve(cplx z, double tol) const {
    // y = V (E exp(z D) E^T e_1) ||psi||, with the peak exponent pulled out
    // into log_scale so imaginary-time weights never overflow
    const double shift = (z.real() != 0.0) ? (z.real() * (z.real() > 0 ? ritz_values_.maxCoeff()
                                                                       : ritz_values_.minCoeff()))
                                           : 0.0;
    Eigen::VectorXcd coeff = Eigen::VectorXcd::Zero(dim_);
    for (int j = 0; j < dim_; ++j) {
        const cplx w = std::exp(z * ritz_values_(j) - shift) * ritz_vectors_(0, j);
        for (int i = 0; i < dim_; ++i) coeff(i) += w * ritz_vectors_(i, j);
    }
    if (!exact_ && dim_ >= 3) {
        // weight on the directions added last bounds what a larger subspace
        // could still change
        const double err = std::hypot(std::abs(coeff(dim_ - 1)), std::abs(coeff(dim_ - 2))) /
                           std::max(1e-300, coeff.norm());
        if (err > tol)
            throw ComputeError("Krylov evolution not converged (estimate " + std::to_string(err) +
                               "); increase the subspace dimension");
    }
    const std::size_t dim = basis_.front().size();
    std::vector<cplx> out(dim, cplx{0.0, 0.0});
    for (int j = 0; j < dim_; ++j) {
        const cplx c = coeff(j);
        const auto& b = basis_[j];
        for (std::size_t i = 0; i < dim; ++i) out[i] += c * b[i];
    }
    for (auto& x : out) x *= psi_norm_;
    const bool unit = z.real() == 0.0 && std::abs(psi_norm_ - 1.0) < 1e-10 && psi_log_scale_ == 0.0;
    StateVector result(n_qubits_, std::move(out), unit);
    result.add_log_scale(psi_log_scale_ + shift);
    return result;
}

}  // namespace qcmc
