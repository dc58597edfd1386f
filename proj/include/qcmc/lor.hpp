#pragma once

#include <utility>
#include <vector>

#include "qcmc/kernel.hpp"
#include "qcmc/state.hpp"

namespace qcmc {

/// Factors of the zeroth-order leading-order-rotation expansion at step
/// length dt: phi = arctan(h_tot |dt|), per-term rotation weights
/// b_j = (|h_j|/h_tot) sqrt(1 + C_L^2) (smooth at dt = 0), the collective
/// rotation weight sqrt(1 + C_L^2), and the amplification factor
/// C_A = sqrt(1 + C_L^2) + e^{h_tot |dt|} - (1 + h_tot |dt|), C_A(0) = 1.
struct LorFactors {
    double phi = 0.0;
    double c_l = 0.0;
    double rotation_weight = 1.0;
    double c_a = 1.0;
    std::vector<double> b;
};

LorFactors lor_factors(const Hamiltonian& h, double dt);

/// C_A(dt) for a Hamiltonian with coefficient 1-norm h_tot.
double amplification_factor(double h_tot, double dt);

/// One sampled factor: either a rotation e^{-i sgn(h_j dt) phi sigma_j}
/// (indices = {j}, theta = 0) or a bare Pauli product sigma_{j_k}...sigma_{j_1}
/// of order k >= 2 with weight prod|h_{j_a} dt|/k! and phase
/// theta = -(pi/2) sum_a sgn(h_{j_a} dt).
struct LorStep {
    bool rotation = true;
    std::vector<int> indices;  // applied left to right = indices[0] first
    double weight = 0.0;
    double theta = 0.0;
};

struct LorSequence {
    double t = 0.0;
    int n_t = 1;
    std::vector<LorStep> steps;
    double total_theta = 0.0;      // theta_S, reduced mod 2pi
    double total_log_weight = 0.0; // ln w_S (w_S underflows at large N_t)
};

/// Draws S = (s_1..s_{N_t}) from the product measure prod w_{s_l}/C_A(dt):
/// rotation class with weight sqrt(1+C_L^2) (then j ~ |h_j|), otherwise
/// order k >= 2 with weight (h_tot dt)^k/k! by inverse CDF over the series
/// truncated at machine precision, then each j_a ~ |h_j|.
LorSequence sample_lor_sequence(const Hamiltonian& h, double t, int n_t, Rng& rng);

/// Applies U_S(t) = U_{s_{N_t}}(dt)...U_{s_1}(dt); returns the evolved state
/// and theta_S. Unitary.
std::pair<StateVector, double> apply_lor_sequence(const StateVector& psi, const Hamiltonian& h,
                                                  const LorSequence& seq);

/// C_T = int_{-T}^{T} dt g(t) C_A(t/N_t)^{N_t}, by midpoint quadrature with
/// doubling refinement until the relative change is below rel_tol.
double c_t(const Hamiltonian& h, const KernelParams& kp, int n_t, double rel_tol = 1e-10);

/// Max 2-norm deviation of [sum_j b_j e^{-i sgn(h_j dt) phi sigma_j}]^{N_t}
/// from (1 - i H dt)^{N_t}; the identity is exact, so this is a roundoff
/// check (dense, n <= 10).
double rotation_only_identity_check(const Hamiltonian& h, double t, int n_t);

}  // namespace qcmc
