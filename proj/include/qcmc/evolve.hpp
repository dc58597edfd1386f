#pragma once

#include <string>

#include "qcmc/state.hpp"

namespace qcmc {

struct EvolverSpec {
    enum class Kind { Exact, Trotter1, Trotter2, Lor };
    Kind kind = Kind::Exact;
    int n_t = 1;  // Trotter steps; ignored by Exact

    void validate() const;
    std::string name() const;
    static EvolverSpec parse(const std::string& kind_name, int n_t);
};

/// e^{-i H t}|psi>, dense eigendecomposition for n <= 10, Krylov beyond;
/// accurate to 1e-10 in 2-norm.
StateVector exact_evolve(const StateVector& psi, const Hamiltonian& h, double t);

/// e^{-beta (H - E0)}|psi> (unnormalised; log_scale carries large factors).
StateVector imaginary_exact_evolve(const StateVector& psi, const Hamiltonian& h,
                                   double beta, double e0 = 0.0);

/// One first/second-order Trotter step of duration dt, in place. Group order
/// is ascending for order 1; order 2 runs the palindrome M..1 then 1..M at
/// half steps.
void apply_trotter_step(StateVector& psi, const Hamiltonian& h, double dt, int order);

/// [S_1(t/N_t)]^{N_t}|psi> (order 1) or the symmetric composition (order 2).
StateVector trotter_evolve(const StateVector& psi, const Hamiltonian& h, double t,
                           int n_t, int order = 1);

/// Non-unitary product e^{E0 beta} [S_1(-i beta/N_t)]^{N_t}|psi>. Amplitudes
/// above 1e100 are rescaled into log_scale.
StateVector imaginary_trotter(const StateVector& psi, const Hamiltonian& h, double beta,
                              int n_t, double e0);

/// Backend dispatch for unitary real-time evolution (Lor is a sampled
/// backend and is rejected here).
StateVector evolve(const StateVector& psi, const Hamiltonian& h, double t, const EvolverSpec& spec);

/// Smallest eigenvalue of the QPE effective Hamiltonian
/// H~ = (i/dt) ln S_1(dt), via the principal branch. Rejects dt values whose
/// eigenphases approach +-pi.
double qpe_effective_ground_energy(const Hamiltonian& h, double dt);

}  // namespace qcmc
