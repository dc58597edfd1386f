#pragma once

#include <optional>

#include "qcmc/estimator.hpp"

namespace qcmc {

struct EnergyEstimate {
    double e_hat = 0.0;   // current ground-energy estimate
    double delta_e = 0.0; // uncertainty >= 0; contract E_g in [e_hat +- delta_e]
};

struct ProjectionBoundInput {
    double beta = 0.0;
    double p_b = 0.5;                 // lower bound on the ground-state overlap, in (0,1)
    std::optional<double> gap;        // lower bound on the spectral gap, > 0

    double alpha_b() const { return p_b / (1.0 - p_b); }
    void validate() const;
};

/// Upper bound on <H_bar>(beta) - E_g: the gapless form
/// (2 beta)^{-1} ln(1 + 1/(e alpha)) always applies; with a gap Delta_b and
/// 2 beta Delta_b >= 1 + ln(1 + 1/(e alpha)) the exponential form
/// e^{-2 beta Delta} Delta / (alpha + e^{-2 beta Delta}) applies too.
/// Returns the smaller applicable bound.
double projection_bound(const ProjectionBoundInput& in);

/// Parameters produced by the Theorem-1 selection protocol (Steps 1-7).
struct Theorem1Params {
    double beta = 0.0, eta = 0.0, kappa = 0.0;
    double epsilon = 0.0;  // correlation-level error budget
    double delta = 0.0;    // statistical share (= epsilon/3)
    double x = 0.0;        // gamma_G and gamma_T share
    double e0 = 0.0;
    double tau = 0.0;
    double t_trunc = 0.0;
    long long n_t = 0;
    double n_s = 0.0;      // 4 C_max^4 / (kappa delta^2), may exceed integer range
    double c_max = 1.1;

    KernelParams kernel() const { return {beta, tau, e0, t_trunc}; }
    /// Recomputes every invariant (gamma_G <= x, gamma_T = x, amplification
    /// <= C_max, tau >= beta, sample-size formula); throws on violation.
    void check(double h_tot, double p_b) const;
};

/// Executes the selection protocol literally: E0 = E_hat - dE - 1/beta;
/// epsilon from eta via the Step-2 relation with p_b; delta = epsilon/3;
/// x from x(2+x) = epsilon/3; tau = max(beta, beta sqrt(2 ln 1/x));
/// T from gamma_T = x; N_t from C_A(T/N_t)^{N_t} <= C_max; N_s = 4C_max^4/(kappa delta^2).
Theorem1Params theorem1_params(double beta, double eta, double kappa,
                               const EnergyEstimate& estimate, double p_b, double h_tot,
                               double c_max = 1.1);

struct GssIteration {
    int index = 0;
    double beta = 0.0, e0 = 0.0, tau = 0.0, t_trunc = 0.0;
    long long n_t = 0;
    double n_s = 0.0;
    double estimate = 0.0;
    double delta_e = 0.0;  // after the 3/4 shrink
};

struct GssResult {
    double e_hat = 0.0;
    double delta_e = 0.0;
    std::vector<GssIteration> trace;

    std::string report() const;  // per-iteration text table
};

struct GssOptions {
    EvolverSpec evolver{EvolverSpec::Kind::Exact, 1};
    bool deterministic = true;                 // quadrature engine instead of sampling
    ShotModel shot_model = ShotModel::ExactExpectation;
    double c_max = 1.1;
    int grid_refine = 1;
    std::optional<long> n_s_override;          // sampled mode only; drops the Theorem-1 guarantee
    std::uint64_t seed = 1;
};

/// Iterative ground-state solver: starts at (0, h_tot), each round picks beta
/// from the projection bound (< dE/2), ITS parameters from Theorem 1 with
/// eta = dE/(4 h_tot) and per-round failure budget kappa/N_i, updates the
/// estimate and shrinks dE by 3/4.
GssResult iterative_gss(const Hamiltonian& h, const StateVector& psi0, int n_i, double p_b,
                        double kappa, std::optional<double> gap, const GssOptions& options);

struct E0ScanResult {
    double e_min = 0.0;
    double e0_star = 0.0;
    int excluded_points = 0;  // grid points with unresolved denominator
};

std::vector<double> uniform_grid(double lo, double hi, int points);

/// Variational scan over E0 on precomputed quadrature data, then
/// golden-section refinement to 1e-10 * h_tot around the grid minimum.
E0ScanResult e0_scan_gss(const EvolutionGrid& grid, double beta, double tau,
                         const std::vector<double>& e0_grid);

/// Same on saved Monte Carlo sample caches (numerator observable and
/// identity), re-phasing every record per E0.
E0ScanResult e0_scan_gss(const SampleCache& numerator, const SampleCache& denominator,
                         const std::vector<double>& e0_grid);

struct QsdResult {
    double energy = 0.0;
    double e0_star = 0.0;
    int kept_dimension = 0;  // subspace size after the eigenvalue truncation
};

/// Quantum subspace diagonalisation on the quadrature grid: overlap and
/// Hamiltonian matrices A, B over states at imaginary times `betas`,
/// eigenvalues of A below `eig_threshold` discarded (hard threshold), ground
/// energy of H_eff minimised over the E0 grid.
QsdResult qsd_energy(const EvolutionGrid& grid, const std::vector<double>& betas, double tau,
                     const std::vector<double>& e0_grid, double eig_threshold = 1e-10);

/// Default subspace times beta_a = a T/d with d = 8.
std::vector<double> qsd_default_betas(double t_figure, int d = 8);

}  // namespace qcmc
