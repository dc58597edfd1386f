#include "qcmc/state.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "qcmc/rng.hpp"
#include "qcmc/threading.hpp"

namespace qcmc {

namespace {
std::atomic<int> g_threads{1};
constexpr std::size_t kReduceChunks = 64;  // fixed, so sums are thread-count independent
}  // namespace

int thread_count() { return g_threads.load(); }

void set_thread_count(int n) { g_threads.store(n < 1 ? 1 : n); }

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t grain) {
    const int workers = thread_count();
    const std::size_t len = end - begin;
    if (workers <= 1 || len < grain) {
        fn(begin, end);
        return;
    }
    const std::size_t parts = std::min<std::size_t>(workers, (len + grain - 1) / grain);
    std::vector<std::thread> pool;
    pool.reserve(parts - 1);
    const std::size_t step = (len + parts - 1) / parts;
    for (std::size_t p = 1; p < parts; ++p) {
        const std::size_t lo = begin + p * step;
        const std::size_t hi = std::min(end, lo + step);
        if (lo < hi) pool.emplace_back(fn, lo, hi);
    }
    fn(begin, std::min(end, begin + step));
    for (auto& t : pool) t.join();
}

int max_qubits() {
    static const int cached = [] {
        if (const char* env = std::getenv("QCMC_MAX_QUBITS")) {
            const int v = std::atoi(env);
            if (v >= 1 && v <= 40) return v;
        }
        return 26;
    }();
    return cached;
}

namespace {

void guard_qubits(int n) {
    if (n < 1) throw ValidationError("state needs at least one qubit");
    if (n > max_qubits())
        throw ResourceError("refusing " + std::to_string(n) + " qubits (limit " +
                            std::to_string(max_qubits()) + ", override with QCMC_MAX_QUBITS)");
}

// Phase of sigma_p on basis state b: i^{#Y} * (-1)^{popcount(b & z_mask)}
inline cplx pauli_phase(const PauliString& p, std::uint64_t b) {
    static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx base = i_pow[std::popcount(p.y_mask()) & 3];
    return (std::popcount(b & p.z_mask()) & 1) ? -base : base;
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    guard_qubits(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes, bool normalised)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)), normalised_(normalised) {
    guard_qubits(n_qubits);
    if (amps_.size() != (std::size_t{1} << n_qubits))
        throw ValidationError("amplitude count must be 2^n_qubits");
}

StateVector StateVector::plus_state(int n_qubits) {
    guard_qubits(n_qubits);
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<cplx> a(dim, cplx{1.0 / std::sqrt(static_cast<double>(dim)), 0.0});
    return StateVector(n_qubits, std::move(a), true);
}

StateVector StateVector::basis_state(int n_qubits, std::uint64_t index) {
    guard_qubits(n_qubits);
    if (index >= (std::uint64_t{1} << n_qubits)) throw ValidationError("basis index out of range");
    std::vector<cplx> a(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    a[index] = 1.0;
    return StateVector(n_qubits, std::move(a), true);
}

double StateVector::norm() const {
    double chunk[kReduceChunks] = {};
    const std::size_t n = amps_.size();
    const std::size_t step = (n + kReduceChunks - 1) / kReduceChunks;
    for (std::size_t c = 0; c < kReduceChunks; ++c) {
        double s = 0.0;
        const std::size_t hi = std::min(n, (c + 1) * step);
        for (std::size_t i = c * step; i < hi; ++i) s += std::norm(amps_[i]);
        chunk[c] = s;
    }
    double total = 0.0;
    for (double s : chunk) total += s;
    return std::sqrt(total);
}

void StateVector::normalise() {
    const double nrm = norm();
    if (nrm == 0.0) throw ComputeError("cannot normalise the zero state");
    const double inv = 1.0 / nrm;
    for (auto& a : amps_) a *= inv;
    normalised_ = true;
    log_scale_ = 0.0;
}

void StateVector::renormalise_scale() {
    double peak = 0.0;
    for (const auto& a : amps_) peak = std::max(peak, std::abs(a));
    if (peak == 0.0) return;
    const double inv = 1.0 / peak;
    for (auto& a : amps_) a *= inv;
    log_scale_ += std::log(peak);
}

void StateVector::check_finite(const char* context) const {
    for (const auto& a : amps_)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw ComputeError(std::string("non-finite amplitude after ") + context);
}

void apply_pauli_inplace(StateVector& psi, const PauliString& p) {
    if (psi.n_qubits() != p.n_qubits())
        throw ValidationError("apply_pauli: dimension mismatch");
    auto a = psi.amplitudes();
    const std::uint64_t x = p.x_mask();
    if (x == 0) {
        parallel_for(0, a.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t b = lo; b < hi; ++b) a[b] *= pauli_phase(p, b);
        });
        return;
    }
    const std::uint64_t pivot = x & (~x + 1);  // lowest flip bit; pairs (b, b^x)
    parallel_for(0, a.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t b = lo; b < hi; ++b) {
            if (b & pivot) continue;
            const std::size_t q = b ^ x;
            const cplx ab = a[b], aq = a[q];
            a[q] = pauli_phase(p, b) * ab;
            a[b] = pauli_phase(p, q) * aq;
        }
    });
}

StateVector apply_pauli(const StateVector& psi, const PauliString& p) {
    StateVector out = psi;
    apply_pauli_inplace(out, p);
    return out;
}

void apply_exp_pauli_inplace(StateVector& psi, const PauliString& p, double theta, ExpMode mode) {
    if (psi.n_qubits() != p.n_qubits())
        throw ValidationError("apply_exp_pauli: dimension mismatch");
    if (!std::isfinite(theta)) throw ValidationError("apply_exp_pauli: non-finite angle");
    auto a = psi.amplitudes();
    const std::uint64_t x = p.x_mask();
    if (mode == ExpMode::Real) {
        const double ct = std::cos(theta), st = std::sin(theta);
        const cplx mist{0.0, -st};  // -i sin(theta)
        if (x == 0) {
            // diagonal: phase exp(-i theta s_b), s_b = +-1
            const cplx ep = ct + mist, em = ct - mist;
            const std::uint64_t z = p.z_mask();
            parallel_for(0, a.size(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t b = lo; b < hi; ++b)
                    a[b] *= (std::popcount(b & z) & 1) ? em : ep;
            });
        } else {
            const std::uint64_t pivot = x & (~x + 1);
            parallel_for(0, a.size(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t b = lo; b < hi; ++b) {
                    if (b & pivot) continue;
                    const std::size_t q = b ^ x;
                    const cplx ab = a[b], aq = a[q];
                    a[b] = ct * ab + mist * (pauli_phase(p, q) * aq);
                    a[q] = ct * aq + mist * (pauli_phase(p, b) * ab);
                }
            });
        }
    } else {
        const double ch = std::cosh(theta), sh = std::sinh(theta);
        if (x == 0) {
            const double ep = ch - sh, em = ch + sh;  // exp(-theta s_b)
            const std::uint64_t z = p.z_mask();
            parallel_for(0, a.size(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t b = lo; b < hi; ++b)
                    a[b] *= (std::popcount(b & z) & 1) ? em : ep;
            });
        } else {
            const std::uint64_t pivot = x & (~x + 1);
            parallel_for(0, a.size(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t b = lo; b < hi; ++b) {
                    if (b & pivot) continue;
                    const std::size_t q = b ^ x;
                    const cplx ab = a[b], aq = a[q];
                    a[b] = ch * ab - sh * (pauli_phase(p, q) * aq);
                    a[q] = ch * aq - sh * (pauli_phase(p, b) * ab);
                }
            });
        }
        psi.set_normalised(false);
    }
}

StateVector apply_exp_pauli(const StateVector& psi, const PauliString& p, double theta, ExpMode mode) {
    StateVector out = psi;
    apply_exp_pauli_inplace(out, p, theta, mode);
    return out;
}

namespace {

// <phi|psi> over raw amplitudes, fixed-chunk summation
cplx raw_inner(std::span<const cplx> phi, std::span<const cplx> psi) {
    cplx chunk[kReduceChunks] = {};
    const std::size_t n = phi.size();
    const std::size_t step = (n + kReduceChunks - 1) / kReduceChunks;
    for (std::size_t c = 0; c < kReduceChunks; ++c) {
        cplx s{0.0, 0.0};
        const std::size_t hi = std::min(n, (c + 1) * step);
        for (std::size_t i = c * step; i < hi; ++i) s += std::conj(phi[i]) * psi[i];
        chunk[c] = s;
    }
    cplx total{0.0, 0.0};
    for (const cplx& s : chunk) total += s;
    return total;
}

// <phi|sigma_p|psi> without scale factors
cplx raw_pauli_element(std::span<const cplx> phi, const PauliString& p, std::span<const cplx> psi) {
    const std::uint64_t x = p.x_mask();
    cplx chunk[kReduceChunks] = {};
    const std::size_t n = phi.size();
    const std::size_t step = (n + kReduceChunks - 1) / kReduceChunks;
    for (std::size_t c = 0; c < kReduceChunks; ++c) {
        cplx s{0.0, 0.0};
        const std::size_t hi = std::min(n, (c + 1) * step);
        for (std::size_t b = c * step; b < hi; ++b)
            s += std::conj(phi[b ^ x]) * (pauli_phase(p, b) * psi[b]);
        chunk[c] = s;
    }
    cplx total{0.0, 0.0};
    for (const cplx& s : chunk) total += s;
    return total;
}

void check_dims(const StateVector& a, const StateVector& b, const char* op) {
    if (a.n_qubits() != b.n_qubits())
        throw ValidationError(std::string(op) + ": dimension mismatch");
}

}  // namespace

cplx inner(const StateVector& phi, const StateVector& psi) {
    check_dims(phi, psi, "inner");
    cplx v = raw_inner(phi.amplitudes(), psi.amplitudes());
    const double ls = phi.log_scale() + psi.log_scale();
    return ls == 0.0 ? v : v * std::exp(ls);
}

cplx matrix_element(const StateVector& phi, const PauliString& p, const StateVector& psi) {
    check_dims(phi, psi, "matrix_element");
    if (phi.n_qubits() != p.n_qubits()) throw ValidationError("matrix_element: operator dimension mismatch");
    cplx v = raw_pauli_element(phi.amplitudes(), p, psi.amplitudes());
    const double ls = phi.log_scale() + psi.log_scale();
    return ls == 0.0 ? v : v * std::exp(ls);
}

cplx matrix_element(const StateVector& phi, const Hamiltonian& h, const StateVector& psi) {
    check_dims(phi, psi, "matrix_element");
    if (phi.n_qubits() != h.n_qubits()) throw ValidationError("matrix_element: operator dimension mismatch");
    cplx v{0.0, 0.0};
    for (const auto& t : h.terms())
        v += t.coeff * raw_pauli_element(phi.amplitudes(), t.string, psi.amplitudes());
    const double ls = phi.log_scale() + psi.log_scale();
    return ls == 0.0 ? v : v * std::exp(ls);
}

double expectation(const StateVector& psi, const Hamiltonian& h) {
    if (psi.n_qubits() != h.n_qubits()) throw ValidationError("expectation: dimension mismatch");
    const auto a = psi.amplitudes();
    const cplx den = raw_inner(a, a);
    if (den.real() <= 0.0) throw ComputeError("expectation of a zero-norm state");
    cplx num{0.0, 0.0};
    for (const auto& t : h.terms()) num += t.coeff * raw_pauli_element(a, t.string, a);
    const double value = num.real() / den.real();
    const double residue = std::abs(num.imag()) / std::max(1.0, std::abs(num.real()));
    if (residue > 1e-8)
        throw ComputeError("expectation value has imaginary residue " + std::to_string(residue) +
                           " (Hermiticity violation)");
    return value;
}

StateVector apply_hamiltonian(const StateVector& psi, const Hamiltonian& h) {
    if (psi.n_qubits() != h.n_qubits()) throw ValidationError("apply_hamiltonian: dimension mismatch");
    StateVector out(psi.n_qubits());
    auto o = out.amplitudes();
    std::fill(o.begin(), o.end(), cplx{0.0, 0.0});
    const auto a = psi.amplitudes();
    for (const auto& t : h.terms()) {
        const std::uint64_t x = t.string.x_mask();
        for (std::size_t b = 0; b < a.size(); ++b)
            o[b ^ x] += t.coeff * (pauli_phase(t.string, b) * a[b]);
    }
    out.set_normalised(false);
    out.add_log_scale(psi.log_scale());
    return out;
}

void apply_fermion_create_inplace(StateVector& psi, int mode) {
    if (mode < 0 || mode >= psi.n_qubits()) throw ValidationError("fermion mode out of range");
    auto a = psi.amplitudes();
    const std::uint64_t m = std::uint64_t{1} << mode;
    const std::uint64_t string = m - 1;  // Z string over modes below
    // every occupied index has exactly one unoccupied partner, so one pass
    for (std::size_t b = 0; b < a.size(); ++b) {
        if (b & m) continue;
        const double sign = (std::popcount(b & string) & 1) ? -1.0 : 1.0;
        a[b | m] = sign * a[b];
        a[b] = 0.0;
    }
    psi.set_normalised(false);
}

StateVector initial_state(const ModelSpec& spec) {
    if (spec.family == ModelSpec::Family::File)
        throw ValidationError("initial_state for a file model needs the qubit count; use initial_state(spec, n)");
    return initial_state(spec, spec.n_qubits());
}

StateVector initial_state(const ModelSpec& spec, int n_qubits) {
    using F = ModelSpec::Family;
    switch (spec.family) {
        case F::Tfi1d:
        case F::Tfi2d:
            return StateVector::plus_state(n_qubits);
        case F::Afh1d: {
            // (|01> - |10>)/sqrt(2) on each neighbouring pair (2i, 2i+1)
            StateVector psi(n_qubits);
            auto a = psi.amplitudes();
            std::fill(a.begin(), a.end(), cplx{0.0, 0.0});
            const int pairs = n_qubits / 2;
            const double w = std::pow(2.0, -0.5 * pairs);
            for (std::uint64_t m = 0; m < (std::uint64_t{1} << pairs); ++m) {
                std::uint64_t b = 0;
                int minus = 0;
                for (int i = 0; i < pairs; ++i) {
                    if (m & (std::uint64_t{1} << i)) {
                        b |= std::uint64_t{1} << (2 * i + 1);  // |lo=0,hi=1>, sign -1
                        ++minus;
                    } else {
                        b |= std::uint64_t{1} << (2 * i);      // |lo=1,hi=0>, sign +1
                    }
                }
                a[b] = (minus & 1) ? -w : w;
            }
            return psi;
        }
        case F::Fh1d: {
            const int ns = n_qubits / 2;
            StateVector psi(n_qubits);  // vacuum
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            for (int l = 0; l < ns / 2; ++l) {
                const int site_a = 2 * l, site_b = 2 * l + 1;
                StateVector t1 = psi;
                apply_fermion_create_inplace(t1, ns + site_b);  // a^dag_{B,down}
                apply_fermion_create_inplace(t1, site_a);       // a^dag_{A,up}
                StateVector t2 = psi;
                apply_fermion_create_inplace(t2, ns + site_a);
                apply_fermion_create_inplace(t2, site_b);
                auto o = psi.amplitudes();
                const auto x1 = t1.amplitudes(), x2 = t2.amplitudes();
                for (std::size_t b = 0; b < o.size(); ++b) o[b] = inv_sqrt2 * (x1[b] + x2[b]);
            }
            psi.set_normalised(true);
            return psi;
        }
        case F::RandomK:
        case F::Random2:
        case F::File:
            return StateVector::basis_state(n_qubits, 0);
    }
    throw ValidationError("unknown model family");
}

namespace {

using Vec = std::vector<cplx>;

cplx vdot(const Vec& a, const Vec& b) {
    return raw_inner(std::span<const cplx>(a), std::span<const cplx>(b));
}

double vnorm(const Vec& a) { return std::sqrt(std::abs(vdot(a, a).real())); }

void h_apply(const Hamiltonian& h, const Vec& in, Vec& out) {
    std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
    for (const auto& t : h.terms()) {
        const std::uint64_t x = t.string.x_mask();
        for (std::size_t b = 0; b < in.size(); ++b)
            out[b ^ x] += t.coeff * (pauli_phase(t.string, b) * in[b]);
    }
}

Vec deterministic_vector(std::size_t dim, std::uint64_t stream) {
    Rng rng = Rng(0x9c0ffee5u).derive(stream);
    Vec v(dim);
    for (auto& x : v) x = cplx{rng.normal(), rng.normal()};
    return v;
}

void orthogonalise(Vec& v, const std::vector<const Vec*>& basis) {
    for (const Vec* b : basis) {
        const cplx c = vdot(*b, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * (*b)[i];
    }
}

struct EigenPair {
    double value;
    Vec vector;
    double residual;
    int matvecs;
};

// Lowest eigenpair of a real symmetric tridiagonal matrix by implicit-shift
// QL with accumulated eigenvectors (classic dense routine; k stays small).
void tridiag_lowest(const std::vector<double>& d_in, const std::vector<double>& e_in,
                    double& value, std::vector<double>& y) {
    const int n = static_cast<int>(d_in.size());
    std::vector<double> d = d_in;
    std::vector<double> e = e_in;
    e.resize(n, 0.0);
    std::vector<std::vector<double>> z(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) z[i][i] = 1.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 50) throw ComputeError("tridiagonal QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k2 = 0; k2 < n; ++k2) {
                        f = z[k2][i + 1];
                        z[k2][i + 1] = s * z[k2][i] + c * f;
                        z[k2][i] = c * z[k2][i] - s * f;
                    }
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    int lowest = 0;
    for (int i = 1; i < n; ++i)
        if (d[i] < d[lowest]) lowest = i;
    value = d[lowest];
    y.resize(n);
    for (int i = 0; i < n; ++i) y[i] = z[i][lowest];
}

// Lowest eigenpair of H restricted orthogonal to `deflate`, by explicitly
// restarted Lanczos with full reorthogonalisation.
EigenPair lowest_eigenpair(const Hamiltonian& h, Vec v0, const std::vector<const Vec*>& deflate,
                           double tol, int max_iter) {
    const std::size_t dim = v0.size();
    // keep the reorthogonalised basis under ~1 GB; restart explicitly beyond
    const std::size_t mem_cap = std::clamp<std::size_t>((std::size_t{1} << 30) / (dim * sizeof(cplx)), 24, 140);
    const int m_cap = static_cast<int>(std::min(dim, mem_cap));
    const double scale = std::max(1.0, h.h_tot());
    int matvecs = 0;

    orthogonalise(v0, deflate);
    if (vnorm(v0) < 1e-12) v0 = deterministic_vector(dim, 0x7157);

    double best_value = 0.0;
    Vec best_vec;
    double best_res = std::numeric_limits<double>::infinity();

    int used = 0;
    std::uint64_t inject = 1;
    while (used < max_iter) {
        // one Lanczos cycle from v0
        std::vector<Vec> basis;
        std::vector<double> alpha, beta;
        orthogonalise(v0, deflate);
        double nv = vnorm(v0);
        if (nv < 1e-12) {
            v0 = deterministic_vector(dim, 0x7157 + inject++);
            continue;
        }
        for (auto& x : v0) x *= 1.0 / nv;
        basis.push_back(v0);

        Vec w(dim);
        bool exhausted = false;
        while (static_cast<int>(basis.size()) <= m_cap && used < max_iter) {
            h_apply(h, basis.back(), w);
            ++matvecs;
            ++used;
            const double a = vdot(basis.back(), w).real();
            alpha.push_back(a);
            // full reorthogonalisation against the cycle basis and deflated vectors
            for (const Vec* d : deflate) {
                const cplx c = vdot(*d, w);
                for (std::size_t i = 0; i < dim; ++i) w[i] -= c * (*d)[i];
            }
            for (int pass = 0; pass < 2; ++pass) {
                for (const Vec& b : basis) {
                    const cplx c = vdot(b, w);
                    for (std::size_t i = 0; i < dim; ++i) w[i] -= c * b[i];
                }
            }
            const double nb = vnorm(w);
            if (nb < 1e-10 * scale || basis.size() + deflate.size() >= dim) {
                exhausted = true;
                break;
            }
            beta.push_back(nb);
            Vec next = w;
            for (auto& x : next) x *= 1.0 / nb;
            basis.push_back(std::move(next));
        }

        // diagonalise the tridiagonal and take the lowest Ritz pair
        const int k = static_cast<int>(alpha.size());
        if (k == 0) break;
        std::vector<double> off(beta.begin(), beta.begin() + (k - 1));
        double value;
        std::vector<double> y;
        tridiag_lowest(alpha, off, value, y);

        Vec x(dim, cplx{0.0, 0.0});
        for (int j = 0; j < k; ++j)
            for (std::size_t i = 0; i < dim; ++i) x[i] += y[j] * basis[j][i];
        const double nx = vnorm(x);
        for (auto& q : x) q *= 1.0 / nx;

        h_apply(h, x, w);
        ++matvecs;
        for (std::size_t i = 0; i < dim; ++i) w[i] -= value * x[i];
        const double res = vnorm(w);

        if (res < best_res) {
            best_res = res;
            best_value = value;
            best_vec = x;
        }
        if (res <= tol * scale) break;
        if (exhausted && basis.size() + deflate.size() >= dim) break;  // nothing left to explore
        if (exhausted) {
            // the start spanned an exact invariant subspace: deterministic
            // restart, keeping a component along the best direction so far
            v0 = deterministic_vector(dim, 0x7157 + inject++);
            orthogonalise(v0, deflate);
            const double nv0 = vnorm(v0);
            for (std::size_t i = 0; i < dim; ++i) v0[i] = v0[i] / nv0 + x[i];
        } else {
            v0 = x;  // explicit restart from the Ritz vector
        }
    }

    if (best_vec.empty()) throw ComputeError("Lanczos produced no Ritz pair");
    return {best_value, std::move(best_vec), best_res, matvecs};
}

}  // namespace

GroundReference lanczos_ground(const Hamiltonian& h, const StateVector& psi0, double tol, int max_iter) {
    if (psi0.n_qubits() != h.n_qubits()) throw ValidationError("lanczos_ground: dimension mismatch");
    const std::size_t dim = psi0.dim();
    const double scale = std::max(1.0, h.h_tot());

    Vec start(psi0.amplitudes().begin(), psi0.amplitudes().end());
    if (vnorm(start) < 1e-14) start = deterministic_vector(dim, 1);
    // a deterministic perturbation gives the start vector overlap with every
    // symmetry sector, so the global ground state is reachable
    {
        Vec r = deterministic_vector(dim, 2);
        const double n0 = vnorm(start), nr = vnorm(r);
        for (std::size_t i = 0; i < dim; ++i) start[i] = start[i] / n0 + 0.05 * r[i] / nr;
    }

    EigenPair ground = lowest_eigenpair(h, std::move(start), {}, tol, max_iter);
    if (ground.residual > tol * scale)
        throw ComputeError("lanczos_ground did not converge: residual " + std::to_string(ground.residual) +
                           " after " + std::to_string(ground.matvecs) + " matvecs");

    double gap = 0.0;
    int total_matvecs = ground.matvecs;
    if (dim > 1) {
        std::vector<const Vec*> deflate{&ground.vector};
        EigenPair first = lowest_eigenpair(h, deterministic_vector(dim, 3), deflate, tol, max_iter);
        total_matvecs += first.matvecs;
        if (first.residual > tol * scale)
            throw ComputeError("lanczos_ground: excited-state pass did not converge");
        gap = std::max(0.0, first.value - ground.value);
    }

    GroundReference ref{
        ground.value,
        StateVector(h.n_qubits(), Vec(ground.vector), true),
        gap,
        0.0,
        ground.residual,
        total_matvecs,
    };
    const cplx ov = raw_inner(std::span<const cplx>(ground.vector), psi0.amplitudes());
    const double psi0_norm = psi0.norm();
    ref.overlap_sq = psi0_norm > 0 ? std::norm(ov) / (psi0_norm * psi0_norm) : 0.0;
    return ref;
}

void save_state(const StateVector& psi, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << "qcmc-state v1 n_qubits=" << psi.n_qubits() << " normalised=" << (psi.normalised() ? 1 : 0)
        << " log_scale=";
    out.precision(17);
    out << psi.log_scale() << "\n";
    // little-endian interleaved re/im doubles
    out.write(reinterpret_cast<const char*>(psi.amplitudes().data()),
              static_cast<std::streamsize>(psi.dim() * sizeof(cplx)));
    if (!out) throw ComputeError("failed writing state to '" + path + "'");
}

StateVector load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open state file '" + path + "'");
    std::string header;
    std::getline(in, header);
    int n = -1, normalised = 1;
    double log_scale = 0.0;
    if (std::sscanf(header.c_str(), "qcmc-state v1 n_qubits=%d normalised=%d log_scale=%lf",
                    &n, &normalised, &log_scale) != 3)
        throw ValidationError("'" + path + "' is not a qcmc state dump");
    guard_qubits(n);
    std::vector<cplx> amps(std::size_t{1} << n);
    in.read(reinterpret_cast<char*>(amps.data()), static_cast<std::streamsize>(amps.size() * sizeof(cplx)));
    if (!in) throw ValidationError("truncated state file '" + path + "'");
    StateVector psi(n, std::move(amps), normalised != 0);
    psi.add_log_scale(log_scale);
    return psi;
}

}  // namespace qcmc
