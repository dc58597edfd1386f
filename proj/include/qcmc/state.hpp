#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qcmc/pauli.hpp"

namespace qcmc {

using cplx = std::complex<double>;

/// Number of qubits the memory guard allows (default 26, override with the
/// QCMC_MAX_QUBITS environment variable).
int max_qubits();

/// Dense complex amplitude vector over n qubits. Qubit 0 is the
/// least-significant amplitude index bit. A state may be intentionally
/// unnormalised (non-unitary evolution); `log_scale` tracks an extracted
/// factor exp(log_scale) so extreme imaginary-time weights never overflow.
///
/// A StateVector is confined to one thread while mutated; distinct states
/// can be processed in parallel.
class StateVector {
public:
    /// |0...0>
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<cplx> amplitudes, bool normalised);

    static StateVector plus_state(int n_qubits);
    static StateVector basis_state(int n_qubits, std::uint64_t index);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }

    bool normalised() const { return normalised_; }
    void set_normalised(bool v) { normalised_ = v; }

    double log_scale() const { return log_scale_; }
    void add_log_scale(double s) { log_scale_ += s; }

    /// 2-norm of the stored amplitudes (excludes the log_scale factor).
    double norm() const;
    void normalise();

    /// Rescales so the largest amplitude magnitude is 1, folding the factor
    /// into log_scale. Used by the imaginary-time overflow guard.
    void renormalise_scale();

    void check_finite(const char* context) const;

private:
    int n_qubits_;
    std::vector<cplx> amps_;
    bool normalised_ = true;
    double log_scale_ = 0.0;
};

enum class ExpMode { Real, Imaginary };

/// sigma_p |psi>
StateVector apply_pauli(const StateVector& psi, const PauliString& p);
void apply_pauli_inplace(StateVector& psi, const PauliString& p);

/// Real mode: (cos t - i sin t sigma_p)|psi> = exp(-i t sigma_p)|psi> (unitary).
/// Imaginary mode: (cosh t - sinh t sigma_p)|psi> = exp(-t sigma_p)|psi>;
/// clears the normalised tag.
StateVector apply_exp_pauli(const StateVector& psi, const PauliString& p, double theta, ExpMode mode);
void apply_exp_pauli_inplace(StateVector& psi, const PauliString& p, double theta, ExpMode mode);

/// <phi|psi>, including both log_scale factors.
cplx inner(const StateVector& phi, const StateVector& psi);

/// <phi|sigma_p|psi>
cplx matrix_element(const StateVector& phi, const PauliString& p, const StateVector& psi);
/// <phi|H|psi>
cplx matrix_element(const StateVector& phi, const Hamiltonian& h, const StateVector& psi);

/// Rayleigh quotient <psi|H|psi>/<psi|psi>. An imaginary residue above
/// 1e-8 (relative) indicates a Hermiticity violation and raises ComputeError.
double expectation(const StateVector& psi, const Hamiltonian& h);

/// H|psi>
StateVector apply_hamiltonian(const StateVector& psi, const Hamiltonian& h);

/// Jordan-Wigner creation operator a^dag_m (mode = qubit index, Z string on
/// lower modes). Used to build fermionic initial states.
void apply_fermion_create_inplace(StateVector& psi, int mode);

/// The paper's initial state for each model family: TFI -> |+>^n, AFH ->
/// nearest-neighbour singlet pairs, FH -> symmetrised two-particle pairs on
/// neighbouring sites, random/File -> |0>^n. The File family needs the
/// explicit qubit count (known only after loading the Hamiltonian).
StateVector initial_state(const ModelSpec& spec);
StateVector initial_state(const ModelSpec& spec, int n_qubits);

struct GroundReference {
    double energy = 0.0;        // E_g
    StateVector state;          // |psi_g>
    double gap = 0.0;           // E_1 - E_g >= 0 (multiplicity-aware)
    double overlap_sq = 0.0;    // p_g = |<psi_g|Psi(0)>|^2
    double residual = 0.0;      // ||H psi_g - E_g psi_g||
    int iterations = 0;
};

/// Matrix-free Lanczos with full reorthogonalisation. Converges the global
/// ground state; the gap comes from a second, deflated pass so degenerate
/// ground states report gap 0. Restarts deterministically when the start
/// vector spans an exact invariant subspace.
GroundReference lanczos_ground(const Hamiltonian& h, const StateVector& psi0,
                               double tol = 1e-10, int max_iter = 600);

/// Debug dump: ASCII header line, then little-endian interleaved re/im doubles.
void save_state(const StateVector& psi, const std::string& path);
StateVector load_state(const std::string& path);

}  // namespace qcmc
