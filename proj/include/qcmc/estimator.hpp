#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "qcmc/evolve.hpp"
#include "qcmc/kernel.hpp"
#include "qcmc/lor.hpp"

namespace qcmc {

/// Observable written as O = sum_j a_j O_j with real a_j and Hermitian
/// unitary O_j (Pauli strings; identity allowed).
struct ObservableDecomposition {
    struct Term {
        double a;
        PauliString op;
    };
    std::vector<Term> terms;

    double a_o() const;
    int n_qubits() const;
    void validate() const;

    static ObservableDecomposition identity(int n_qubits);
    static ObservableDecomposition from_hamiltonian(const Hamiltonian& h);
};

/// <O>(t,t') = e^{i E0 (t-t')} <Psi(0)| e^{i H_bar t'} O e^{-i H_bar t} |Psi(0)>
/// with the chosen unitary backend.
cplx two_time_correlation(const StateVector& psi0, const Hamiltonian& h,
                          const ObservableDecomposition& obs, double t, double t_prime,
                          double e0, const EvolverSpec& evolver);

/// One Hadamard-test shot: +-1 with mean v (|v| <= 1 up to 1e-9 clamp).
int hadamard_shot(Rng& rng, double v);

/// Deterministic pairwise tree reduction (consumes its input). All estimator
/// sums go through this, so re-evaluations (e.g. cache re-phasing at E0 = 0)
/// are bit-identical.
cplx pairwise_sum(std::vector<cplx> values);

enum class ShotModel { ExactExpectation, Shots };

struct CorrelationEstimate {
    cplx value{0.0, 0.0};
    long n_samples = 0;
    long shots_per_sample = 1;
    double a_o = 1.0;
    double norm_factor = 1.0;   // C (Algorithm 1) or C_T (LOR path)
    double variance = 0.0;      // est. variance of Re(value)
    double std_error = 0.0;
    cplx average_phase{0.0, 0.0};
};

/// One record per sample; mu sums are over the M_s shots (exact expectations
/// repeated M_s times in ExactExpectation mode). Re-phasing with any E0 is
/// sgn * e^{i E0 (t - t')} * e^{i(theta_s - theta_sp)} * (mu_r + i mu_i)/M_s.
struct SampleRecord {
    double t = 0.0, t_prime = 0.0;
    int j = 0;
    double sgn = 1.0;
    double theta_s = 0.0, theta_sp = 0.0;
    double mu_r_sum = 0.0, mu_i_sum = 0.0;
};

struct SampleCache {
    double a_o = 1.0;
    double norm_sq = 1.0;  // C^2 or C_T^2
    long m_s = 1;
    std::uint64_t seed = 0;
    std::string observable;  // label only
    std::vector<SampleRecord> records;

    /// a_o * norm_sq / (N_s M_s) * sum_l sgn e^{iE0(t-t')} e^{i(th-th')} (mu_r + i mu_i)
    cplx estimate(double e0) const;
    void save(const std::string& path) const;
    static SampleCache load(const std::string& path);
};

/// Monte Carlo estimator of <O>_G(-i beta, i beta): draws (t, t') from
/// C^{-2} g g (or (t,S,t',S') from the LOR product measure when the evolver
/// is Lor, which requires a finite truncation T), one j ~ |a_j|/a_O per
/// sample, and M_s Hadamard-test shots per part. ExactExpectation substitutes
/// the exact real/imaginary parts for the shot outcomes.
CorrelationEstimate estimate_itc(const StateVector& psi0, const Hamiltonian& h,
                                 const ObservableDecomposition& obs, const KernelParams& kp,
                                 long n_s, long m_s, const EvolverSpec& evolver,
                                 ShotModel shot_model, Rng& rng, SampleCache* cache = nullptr);

struct ItsResult {
    double value = 0.0;
    CorrelationEstimate numerator;
    CorrelationEstimate denominator;
};

/// Ratio estimator <O>_G(beta) = O_hat / 1_hat. Raises ComputeError when the
/// denominator is not resolved (|1_hat| below 10x its standard error).
ItsResult estimate_its(const StateVector& psi0, const Hamiltonian& h,
                       const ObservableDecomposition& obs, const KernelParams& kp,
                       long n_s, long m_s, const EvolverSpec& evolver, ShotModel shot_model,
                       Rng& rng, SampleCache* cache_num = nullptr, SampleCache* cache_den = nullptr);

/// Deterministic quadrature engine: the states u_k = U~(t_k)|Psi(0)> on the
/// midpoint grid (step T/(20 refine), span +-span_factor*T) and the Gram
/// matrices <u_k'|u_k> and <u_k'|H_bar|u_k>. Everything downstream
/// (imaginary-time curves, E0 scans, subspace matrices) reduces to quadratic
/// forms in the coefficient vector c_k = step * g_beta(t_k) e^{i E0 t_k}.
///
/// When the full state set exceeds `state_budget` bytes the states are not
/// kept; the Gram matrices are then accumulated in blocks (evolutions are
/// recomputed, supported observables fixed to {identity, H_bar}).
class EvolutionGrid {
public:
    EvolutionGrid(const StateVector& psi0, const Hamiltonian& h, const EvolverSpec& evolver,
                  double t_figure, int refine = 1, double span_factor = 10.0,
                  std::size_t state_budget = std::size_t{2} << 30);

    const std::vector<double>& times() const { return grid_.t; }
    double step() const { return grid_.step; }
    double t_figure() const { return t_figure_; }
    const Hamiltonian& hamiltonian() const { return *h_; }

    bool states_stored() const { return !states_.empty(); }
    const StateVector& state(std::size_t k) const;

    const Eigen::MatrixXcd& overlap_gram() const { return p_; }
    const Eigen::MatrixXcd& hamiltonian_gram() const { return q_; }
    /// Gram of an arbitrary observable; needs stored states.
    Eigen::MatrixXcd observable_gram(const ObservableDecomposition& obs) const;

    Eigen::VectorXcd coefficients(double beta, double tau, double e0) const;

    /// <phi|phi> for phi = sum_k c_k u_k (the ITS denominator).
    double denominator(double beta, double tau, double e0) const;

    /// Rayleigh quotient c^dag Q c / c^dag P c for O = H_bar.
    double its_energy(double beta, double tau, double e0) const;

    /// Same with an explicit numerator Gram.
    double rayleigh(const Eigen::MatrixXcd& num_gram, double beta, double tau, double e0) const;

    /// Plain quadrature numerator <phi|O|phi> (no ratio).
    double numerator(const Eigen::MatrixXcd& num_gram, double beta, double tau, double e0) const;

private:
    const Hamiltonian* h_;
    EvolverSpec evolver_;
    double t_figure_;
    TimeGrid grid_;
    std::vector<StateVector> states_;
    Eigen::MatrixXcd p_, q_;
};

/// <O>_G(beta) by deterministic quadrature (the figure engine): builds the
/// grid from kp.t_trunc and returns the Rayleigh quotient. beta = 0 returns
/// the plain expectation in |Psi(0)>. Unitary backends only.
double quadrature_its(const StateVector& psi0, const Hamiltonian& h,
                      const ObservableDecomposition& obs, const KernelParams& kp,
                      const EvolverSpec& evolver, int refine = 1);

/// Exact imaginary-time value <Psi|e^{-beta H}Oe^{-beta H}|Psi> /
/// <Psi|e^{-2 beta H}|Psi> (E0-independent), via the exact backend.
double exact_its(const StateVector& psi0, const Hamiltonian& h,
                 const ObservableDecomposition& obs, double beta);

}  // namespace qcmc
