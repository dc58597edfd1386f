#pragma once

#include <Eigen/Dense>
#include <memory>

#include "qcmc/state.hpp"

namespace qcmc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense matrix of a Pauli string / Hamiltonian (guarded: n <= 14).
Matrix to_dense(const PauliString& p);
Matrix to_dense(const Hamiltonian& h);

struct HamiltonianEigen {
    Eigen::VectorXd values;
    Matrix vectors;
};

/// Cached Hermitian eigendecomposition, keyed by content hash. Intended for
/// n <= 10 (the exact-evolution backend); larger systems use Krylov.
std::shared_ptr<const HamiltonianEigen> dense_eigen_cached(const Hamiltonian& h);

/// Largest singular value.
double spectral_norm(const Matrix& m);

Vector to_vector(const StateVector& psi);
StateVector to_state(int n_qubits, const Vector& v, bool normalised);

/// Reusable Krylov subspace of (H, psi): evolve() applies exp(z H) psi for
/// any complex z from one Lanczos basis with full reorthogonalisation,
/// verifying convergence by comparing truncated subspace results.
class KrylovSpace {
public:
    KrylovSpace(const Hamiltonian& h, const StateVector& psi, int max_dim = 180);

    /// exp(z H)|psi>, accurate to `tol` relative to ||exp(z H) psi||.
    /// Raises ComputeError if the subspace cannot certify the tolerance.
    StateVector evolve(cplx z, double tol = 1e-10) const;

private:
    int n_qubits_;
    double psi_norm_;
    double psi_log_scale_;
    int dim_ = 0;                       // Krylov dimension actually built
    bool exact_ = false;                // invariant subspace found
    std::vector<std::vector<cplx>> basis_;
    Eigen::VectorXd ritz_values_;
    Eigen::MatrixXd ritz_vectors_;      // eigenvectors of the tridiagonal
};

}  // namespace qcmc
