#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qcmc/errors.hpp"

namespace qcmc {

enum class Axis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-qubit Pauli operators. Qubit 0 is the
/// least-significant bit of the amplitude index; in the text form ("XZIY")
/// the leftmost character is qubit 0. Every PauliString is Hermitian,
/// unitary and squares to the identity.
class PauliString {
public:
    explicit PauliString(int n_qubits);  // identity on n qubits
    PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask);
    explicit PauliString(std::string_view word);

    int n_qubits() const { return n_qubits_; }
    Axis axis(int qubit) const;
    void set_axis(int qubit, Axis a);

    /// Qubits acted on by X or Y (bit flips).
    std::uint64_t x_mask() const { return x_mask_; }
    /// Qubits acted on by Z or Y (phase flips).
    std::uint64_t z_mask() const { return z_mask_; }
    std::uint64_t y_mask() const { return x_mask_ & z_mask_; }

    int weight() const;
    bool is_identity() const { return x_mask_ == 0 && z_mask_ == 0; }

    /// Parity rule: two strings commute iff the number of qubits where both
    /// act with different non-identity axes is even.
    bool commutes_with(const PauliString& other) const;

    std::string word() const;

    bool operator==(const PauliString&) const = default;

private:
    int n_qubits_;
    std::uint64_t x_mask_ = 0;
    std::uint64_t z_mask_ = 0;
};

struct PauliTerm {
    double coeff = 0.0;  // real, finite, nonzero when stored
    PauliString string;
};

/// Traceless Hamiltonian  H = sum_j h_j sigma_j  together with its ordered
/// Trotter grouping H_1..H_M. Terms within one group pairwise commute, so
/// each group exponential factorises exactly into per-term rotations.
/// Immutable after construction; safe to share across threads.
class Hamiltonian {
public:
    /// `groups` is an ordered partition of term indices. Validates coverage,
    /// commutation within groups, finiteness and tracelessness.
    Hamiltonian(int n_qubits, std::vector<PauliTerm> terms,
                std::vector<std::vector<int>> groups);

    /// One group per term, in term order.
    static Hamiltonian ungrouped(int n_qubits, std::vector<PauliTerm> terms);

    int n_qubits() const { return n_qubits_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    const std::vector<std::vector<int>>& groups() const { return groups_; }
    int n_groups() const { return static_cast<int>(groups_.size()); }

    /// h_tot = sum_j |h_j|
    double h_tot() const { return h_tot_; }

    /// Content hash used as a cache key by the evolution backends.
    std::uint64_t content_hash() const { return hash_; }

    /// Same Hamiltonian with every coefficient multiplied by c != 0.
    Hamiltonian scaled(double c) const;

private:
    int n_qubits_;
    std::vector<PauliTerm> terms_;
    std::vector<std::vector<int>> groups_;
    double h_tot_ = 0.0;
    std::uint64_t hash_ = 0;
};

struct ModelSpec {
    enum class Family { Tfi1d, Tfi2d, Afh1d, Fh1d, RandomK, Random2, File };
    Family family = Family::Tfi1d;
    int n_spin = 0;            // Tfi1d, Afh1d, RandomK, Random2
    int rows = 0, cols = 0;    // Tfi2d (torus, both >= 3)
    int n_site = 0;            // Fh1d (even; 2*n_site qubits)
    double lambda = 0.0;
    int n_term = 0;            // random families
    std::uint64_t seed = 0;    // random families
    std::string path;          // File

    int n_qubits() const;
    std::string name() const;
};

ModelSpec::Family parse_family(std::string_view name);

/// Builds the model Hamiltonian with its native Trotter grouping:
/// TFI -> {ZZ, X}, AFH -> {XX, YY, ZZ}, FH -> {H_X, H_Y, H_Z},
/// random families -> one term per group.
Hamiltonian build_model(const ModelSpec& spec);

/// Text format: one "coeff pauli-word" per line, '#' comments, uniform word
/// length over {I,X,Y,Z}. Parsing rejects identity words (tracelessness) and
/// reports the offending line number. Grouping defaults to one group per
/// term; serialisation order is group, then in-group order, which makes
/// parse(serialize(h)) the identity on terms.
Hamiltonian parse_hamiltonian_text(std::string_view text);
std::string serialize_hamiltonian(const Hamiltonian& h);
Hamiltonian load_hamiltonian_file(const std::string& path);

}  // namespace qcmc
