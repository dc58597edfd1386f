#include "qcmc/evolve.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "qcmc/dense.hpp"

namespace qcmc {

namespace {

constexpr int kDenseEvolveLimit = 10;
constexpr double kOverflowGuard = 1e100;

}  // namespace

void EvolverSpec::validate() const {
    if (n_t < 1) throw ValidationError("evolver requires N_t >= 1");
}

std::string EvolverSpec::name() const {
    switch (kind) {
        case Kind::Exact: return "exact";
        case Kind::Trotter1: return "trotter1";
        case Kind::Trotter2: return "trotter2";
        case Kind::Lor: return "lor";
    }
    return "?";
}

EvolverSpec EvolverSpec::parse(const std::string& kind_name, int n_t) {
    EvolverSpec spec;
    if (kind_name == "exact") spec.kind = Kind::Exact;
    else if (kind_name == "trotter1") spec.kind = Kind::Trotter1;
    else if (kind_name == "trotter2") spec.kind = Kind::Trotter2;
    else if (kind_name == "lor") spec.kind = Kind::Lor;
    else throw ValidationError("unknown evolver '" + kind_name + "'");
    spec.n_t = n_t;
    spec.validate();
    return spec;
}

StateVector exact_evolve(const StateVector& psi, const Hamiltonian& h, double t) {
    if (psi.n_qubits() != h.n_qubits()) throw ValidationError("exact_evolve: dimension mismatch");
    if (!std::isfinite(t)) throw ValidationError("exact_evolve: non-finite time");
    if (h.n_qubits() <= kDenseEvolveLimit) {
        auto eig = dense_eigen_cached(h);
        Vector v = eig->vectors.adjoint() * to_vector(psi);
        for (Eigen::Index k = 0; k < v.size(); ++k)
            v(k) *= std::exp(cplx{0.0, -eig->values(k) * t});
        return to_state(psi.n_qubits(), eig->vectors * v, psi.normalised());
    }
    return KrylovSpace(h, psi).evolve(cplx{0.0, -t});
}

StateVector imaginary_exact_evolve(const StateVector& psi, const Hamiltonian& h,
                                   double beta, double e0) {
    if (psi.n_qubits() != h.n_qubits()) throw ValidationError("imaginary_exact_evolve: dimension mismatch");
    if (beta < 0.0 || !std::isfinite(beta)) throw ValidationError("imaginary_exact_evolve: beta must be >= 0");
    if (h.n_qubits() <= kDenseEvolveLimit) {
        auto eig = dense_eigen_cached(h);
        Vector v = eig->vectors.adjoint() * to_vector(psi);
        const double peak = -beta * (eig->values.minCoeff() - e0);  // pulled into log_scale
        for (Eigen::Index k = 0; k < v.size(); ++k)
            v(k) *= std::exp(-beta * (eig->values(k) - e0) - peak);
        StateVector out = to_state(psi.n_qubits(), eig->vectors * v, false);
        out.add_log_scale(peak + psi.log_scale());
        return out;
    }
    StateVector out = KrylovSpace(h, psi).evolve(cplx{-beta, 0.0});
    out.add_log_scale(beta * e0);
    return out;
}

void apply_trotter_step(StateVector& psi, const Hamiltonian& h, double dt, int order) {
    const auto& groups = h.groups();
    const auto& terms = h.terms();
    auto apply_group = [&](int g, double step) {
        for (int idx : groups[g])
            apply_exp_pauli_inplace(psi, terms[idx].string, terms[idx].coeff * step, ExpMode::Real);
    };
    if (order == 1) {
        for (int g = 0; g < h.n_groups(); ++g) apply_group(g, dt);
    } else if (order == 2) {
        for (int g = h.n_groups() - 1; g >= 0; --g) apply_group(g, 0.5 * dt);
        for (int g = 0; g < h.n_groups(); ++g) apply_group(g, 0.5 * dt);
    } else {
        throw ValidationError("Trotter order must be 1 or 2");
    }
}

StateVector trotter_evolve(const StateVector& psi, const Hamiltonian& h, double t,
                           int n_t, int order) {
    if (psi.n_qubits() != h.n_qubits()) throw ValidationError("trotter_evolve: dimension mismatch");
    if (n_t < 1) throw ValidationError("trotter_evolve: N_t >= 1 required");
    if (!std::isfinite(t)) throw ValidationError("trotter_evolve: non-finite time");
    StateVector out = psi;
    const double dt = t / n_t;
    for (int s = 0; s < n_t; ++s) apply_trotter_step(out, h, dt, order);
    return out;
}

StateVector imaginary_trotter(const StateVector& psi, const Hamiltonian& h, double beta,
                              int n_t, double e0) {
    if (psi.n_qubits() != h.n_qubits()) throw ValidationError("imaginary_trotter: dimension mismatch");
    if (n_t < 1) throw ValidationError("imaginary_trotter: N_t >= 1 required");
    if (beta < 0.0 || !std::isfinite(beta)) throw ValidationError("imaginary_trotter: beta must be >= 0");
    StateVector out = psi;
    out.set_normalised(false);
    const double dbeta = beta / n_t;
    for (int s = 0; s < n_t; ++s) {
        for (const auto& group : h.groups())
            for (int idx : group)
                apply_exp_pauli_inplace(out, h.terms()[idx].string, h.terms()[idx].coeff * dbeta,
                                        ExpMode::Imaginary);
        double peak = 0.0;
        for (const auto& a : out.amplitudes()) peak = std::max(peak, std::abs(a));
        if (peak > kOverflowGuard) out.renormalise_scale();
    }
    out.add_log_scale(e0 * beta);
    return out;
}

StateVector evolve(const StateVector& psi, const Hamiltonian& h, double t, const EvolverSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case EvolverSpec::Kind::Exact: return exact_evolve(psi, h, t);
        case EvolverSpec::Kind::Trotter1: return trotter_evolve(psi, h, t, spec.n_t, 1);
        case EvolverSpec::Kind::Trotter2: return trotter_evolve(psi, h, t, spec.n_t, 2);
        case EvolverSpec::Kind::Lor:
            throw ValidationError("the LOR backend is sampled; use the estimator interfaces");
    }
    throw ValidationError("unknown evolver kind");
}

double qpe_effective_ground_energy(const Hamiltonian& h, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("qpe: dt must be positive");
    if (h.h_tot() * dt >= 3.141592653589793)
        throw ValidationError("qpe: h_tot * dt must stay below pi (eigenphase wrap)");
    const int n = h.n_qubits();
    if (n > 14) throw ResourceError("qpe dense path limited to 14 qubits");
    const std::size_t dim = std::size_t{1} << n;

    Matrix u(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        StateVector col = StateVector::basis_state(n, c);
        apply_trotter_step(col, h, dt, 1);  // S_1(dt)
        for (std::size_t r = 0; r < dim; ++r) u(r, c) = col.amplitudes()[r];
    }

    // Cayley transform: for unitary U, H' = i (I - U)(I + U)^{-1} is Hermitian
    // with eigenvalues tan(phi/2); the principal log follows as phi = 2 atan.
    const Matrix id = Matrix::Identity(dim, dim);
    Eigen::PartialPivLU<Matrix> lu(id + u);
    const Matrix herm = cplx{0.0, 1.0} * ((id - u) * lu.solve(id));
    if (!herm.allFinite())
        throw ComputeError("qpe: eigenphase at -1 (wrap); reduce dt");
    Eigen::SelfAdjointEigenSolver<Matrix> solver((herm + herm.adjoint()) * 0.5);
    if (solver.info() != Eigen::Success) throw ComputeError("qpe: eigensolver failed");

    const double mu_max = solver.eigenvalues().maxCoeff();
    const double mu_min = solver.eigenvalues().minCoeff();
    const double phase_margin = std::tan(0.5 * (3.141592653589793 - 1e-6));
    if (std::max(std::abs(mu_max), std::abs(mu_min)) > phase_margin)
        throw ComputeError("qpe: eigenphase within 1e-6 of +-pi; reduce dt");
    return -2.0 * std::atan(mu_max) / dt;
}

}  // namespace qcmc
