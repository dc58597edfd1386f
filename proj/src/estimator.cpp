#include "qcmc/estimator.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qcmc {

double ObservableDecomposition::a_o() const {
    double s = 0.0;
    for (const auto& t : terms) s += std::abs(t.a);
    return s;
}

int ObservableDecomposition::n_qubits() const {
    return terms.empty() ? 0 : terms.front().op.n_qubits();
}

void ObservableDecomposition::validate() const {
    if (terms.empty()) throw ValidationError("observable needs at least one term");
    for (const auto& t : terms) {
        if (!std::isfinite(t.a)) throw ValidationError("observable coefficient must be finite");
        if (t.op.n_qubits() != n_qubits()) throw ValidationError("observable qubit counts differ");
    }
    if (!(a_o() > 0.0)) throw ValidationError("observable has zero weight a_O");
}

ObservableDecomposition ObservableDecomposition::identity(int n_qubits) {
    return {{{1.0, PauliString(n_qubits)}}};
}

ObservableDecomposition ObservableDecomposition::from_hamiltonian(const Hamiltonian& h) {
    ObservableDecomposition obs;
    obs.terms.reserve(h.terms().size());
    for (const auto& t : h.terms()) obs.terms.push_back({t.coeff, t.string});
    return obs;
}

cplx two_time_correlation(const StateVector& psi0, const Hamiltonian& h,
                          const ObservableDecomposition& obs, double t, double t_prime,
                          double e0, const EvolverSpec& evolver) {
    obs.validate();
    if (evolver.kind == EvolverSpec::Kind::Lor)
        throw ValidationError("two_time_correlation needs a deterministic backend");
    const StateVector ket = evolve(psi0, h, t, evolver);
    const StateVector bra = evolve(psi0, h, t_prime, evolver);
    cplx v{0.0, 0.0};
    for (const auto& term : obs.terms) v += term.a * matrix_element(bra, term.op, ket);
    return std::exp(cplx{0.0, e0 * (t - t_prime)}) * v;
}

int hadamard_shot(Rng& rng, double v) {
    if (std::abs(v) > 1.0 + 1e-9)
        throw ComputeError("hadamard_shot: |expectation| = " + std::to_string(std::abs(v)) +
                           " > 1 (non-physical)");
    v = std::clamp(v, -1.0, 1.0);
    return rng.uniform() < 0.5 * (1.0 + v) ? +1 : -1;
}

cplx SampleCache::estimate(double e0) const {
    if (records.empty()) throw ValidationError("empty sample cache");
    std::vector<cplx> summands;
    summands.reserve(records.size());
    for (const auto& r : records) {
        const double phase = e0 * (r.t - r.t_prime) + r.theta_s - r.theta_sp;
        const cplx factor = r.sgn * std::exp(cplx{0.0, phase});
        summands.push_back(factor * cplx{r.mu_r_sum, r.mu_i_sum} / static_cast<double>(m_s));
    }
    const double prefactor = a_o * norm_sq;
    return prefactor * pairwise_sum(std::move(summands)) / static_cast<double>(records.size());
}

void SampleCache::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << "# qcmc sample cache v1\n";
    out.precision(17);
    out << "a_o " << a_o << "\n";
    out << "norm_sq " << norm_sq << "\n";
    out << "m_s " << m_s << "\n";
    out << "seed " << seed << "\n";
    out << "observable " << (observable.empty() ? "-" : observable) << "\n";
    out << "columns l t t_prime j sgn theta_s theta_sp mu_r_sum mu_i_sum\n";
    for (std::size_t l = 0; l < records.size(); ++l) {
        const auto& r = records[l];
        out << l << " " << r.t << " " << r.t_prime << " " << r.j << " " << r.sgn << " "
            << r.theta_s << " " << r.theta_sp << " " << r.mu_r_sum << " " << r.mu_i_sum << "\n";
    }
}

SampleCache SampleCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open sample cache '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line != "# qcmc sample cache v1") throw ValidationError("'" + path + "' is not a sample cache");
    SampleCache cache;
    std::string key;
    in >> key >> cache.a_o;
    in >> key >> cache.norm_sq;
    in >> key >> cache.m_s;
    in >> key >> cache.seed;
    in >> key >> cache.observable;
    std::getline(in, line);  // rest of observable line
    std::getline(in, line);  // columns header
    long l;
    SampleRecord r;
    while (in >> l >> r.t >> r.t_prime >> r.j >> r.sgn >> r.theta_s >> r.theta_sp >> r.mu_r_sum >>
           r.mu_i_sum)
        cache.records.push_back(r);
    if (cache.records.empty()) throw ValidationError("sample cache '" + path + "' holds no records");
    return cache;
}

cplx pairwise_sum(std::vector<cplx> v) {
    if (v.empty()) return {0.0, 0.0};
    std::size_t n = v.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n % 2) {
            v[half] = v[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return v[0];
}

namespace {

struct DrawnCircuit {
    double t = 0.0, t_prime = 0.0;
    double theta_s = 0.0, theta_sp = 0.0;
    StateVector ket, bra;
};

// (t, S) with density proportional to g(t) w_S(t) on [-T, T]: truncated-g
// proposal, acceptance C_A(t/N_t)^{N_t} / C_A(T/N_t)^{N_t}
std::pair<double, LorSequence> draw_lor_time_sequence(const Hamiltonian& h, const KernelParams& kp,
                                                      int n_t, Rng& rng) {
    const double cap = std::pow(amplification_factor(h.h_tot(), kp.t_trunc / n_t), n_t);
    for (;;) {
        const double t = sample_time(kp, rng);
        const double w = std::pow(amplification_factor(h.h_tot(), t / n_t), n_t);
        if (rng.uniform() * cap <= w) return {t, sample_lor_sequence(h, t, n_t, rng)};
    }
}

}  // namespace

CorrelationEstimate estimate_itc(const StateVector& psi0, const Hamiltonian& h,
                                 const ObservableDecomposition& obs, const KernelParams& kp,
                                 long n_s, long m_s, const EvolverSpec& evolver,
                                 ShotModel shot_model, Rng& rng, SampleCache* cache) {
    obs.validate();
    kp.validate();
    evolver.validate();
    if (n_s < 1) throw ValidationError("estimate_itc: N_s >= 1 required");
    if (m_s < 1) throw ValidationError("estimate_itc: M_s >= 1 required");
    if (psi0.n_qubits() != h.n_qubits() || obs.n_qubits() != h.n_qubits())
        throw ValidationError("estimate_itc: dimension mismatch");
    const bool lor = evolver.kind == EvolverSpec::Kind::Lor;
    if (lor && !kp.truncated())
        throw ValidationError("the LOR path requires a finite truncation time T");

    const double a_o = obs.a_o();
    const double norm_factor = lor ? c_t(h, kp, evolver.n_t) : kp.normalisation();

    // cumulative |a_j| for the observable-term draw
    std::vector<double> cdf;
    cdf.reserve(obs.terms.size());
    double run = 0.0;
    for (const auto& t : obs.terms) {
        run += std::abs(t.a);
        cdf.push_back(run);
    }

    std::vector<cplx> summands(n_s);
    std::vector<cplx> phasors(n_s);
    std::vector<double> re_parts(n_s);
    if (cache) {
        cache->a_o = a_o;
        cache->norm_sq = norm_factor * norm_factor;
        cache->m_s = m_s;
        cache->records.resize(n_s);
    }

    for (long l = 0; l < n_s; ++l) {
        Rng sample_rng = rng.derive(static_cast<std::uint64_t>(l));

        DrawnCircuit circ{.ket = psi0, .bra = psi0};
        if (lor) {
            auto [t, seq] = draw_lor_time_sequence(h, kp, evolver.n_t, sample_rng);
            auto [tp, seqp] = draw_lor_time_sequence(h, kp, evolver.n_t, sample_rng);
            circ.t = t;
            circ.t_prime = tp;
            auto ket = apply_lor_sequence(psi0, h, seq);
            auto bra = apply_lor_sequence(psi0, h, seqp);
            circ.theta_s = ket.second;
            circ.theta_sp = bra.second;
            circ.ket = std::move(ket.first);
            circ.bra = std::move(bra.first);
        } else {
            circ.t = sample_time(kp, sample_rng);
            circ.t_prime = sample_time(kp, sample_rng);
            circ.ket = evolve(psi0, h, circ.t, evolver);
            circ.bra = evolve(psi0, h, circ.t_prime, evolver);
        }

        // j ~ |a_j| / a_O, one draw per sample for both shot batches
        const double u = sample_rng.uniform() * cdf.back();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const int j = static_cast<int>(std::min<std::ptrdiff_t>(
            it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
        const double sgn = obs.terms[j].a < 0.0 ? -1.0 : 1.0;

        const cplx v = matrix_element(circ.bra, obs.terms[j].op, circ.ket);
        double mu_r_sum = 0.0, mu_i_sum = 0.0;
        if (shot_model == ShotModel::ExactExpectation) {
            mu_r_sum = static_cast<double>(m_s) * v.real();
            mu_i_sum = static_cast<double>(m_s) * v.imag();
        } else {
            for (long k = 0; k < m_s; ++k) mu_r_sum += hadamard_shot(sample_rng, v.real());
            for (long k = 0; k < m_s; ++k) mu_i_sum += hadamard_shot(sample_rng, v.imag());
        }

        const double phase = kp.e0 * (circ.t - circ.t_prime) + circ.theta_s - circ.theta_sp;
        const cplx factor = sgn * std::exp(cplx{0.0, phase});
        const cplx per_sample = factor * cplx{mu_r_sum, mu_i_sum} / static_cast<double>(m_s);
        summands[l] = per_sample;
        re_parts[l] = per_sample.real();
        const double mag = std::abs(per_sample);
        phasors[l] = mag > 1e-300 ? per_sample / mag : cplx{0.0, 0.0};

        if (cache)
            cache->records[l] = {circ.t, circ.t_prime, j, sgn, circ.theta_s, circ.theta_sp,
                                 mu_r_sum, mu_i_sum};
    }

    CorrelationEstimate est;
    est.n_samples = n_s;
    est.shots_per_sample = m_s;
    est.a_o = a_o;
    est.norm_factor = norm_factor;
    const double prefactor = a_o * norm_factor * norm_factor;
    est.value = prefactor * pairwise_sum(std::move(summands)) / static_cast<double>(n_s);
    est.average_phase = pairwise_sum(std::move(phasors)) / static_cast<double>(n_s);

    double mean_re = 0.0;
    for (double r : re_parts) mean_re += r;
    mean_re /= static_cast<double>(n_s);
    double var_re = 0.0;
    for (double r : re_parts) var_re += (r - mean_re) * (r - mean_re);
    var_re /= std::max<long>(1, n_s - 1);
    est.variance = prefactor * prefactor * var_re / static_cast<double>(n_s);
    est.std_error = std::sqrt(est.variance);
    return est;
}

ItsResult estimate_its(const StateVector& psi0, const Hamiltonian& h,
                       const ObservableDecomposition& obs, const KernelParams& kp,
                       long n_s, long m_s, const EvolverSpec& evolver, ShotModel shot_model,
                       Rng& rng, SampleCache* cache_num, SampleCache* cache_den) {
    Rng rng_num = rng.derive(0xA1);
    Rng rng_den = rng.derive(0xB2);
    ItsResult result;
    result.numerator =
        estimate_itc(psi0, h, obs, kp, n_s, m_s, evolver, shot_model, rng_num, cache_num);
    result.denominator = estimate_itc(psi0, h, ObservableDecomposition::identity(h.n_qubits()), kp,
                                      n_s, m_s, evolver, shot_model, rng_den, cache_den);
    const double den = result.denominator.value.real();
    if (std::abs(den) < 10.0 * result.denominator.std_error)
        throw ComputeError("denominator unresolved: |1_hat| = " + std::to_string(std::abs(den)) +
                           " < 10 sigma = " + std::to_string(10.0 * result.denominator.std_error));
    result.value = result.numerator.value.real() / den;
    return result;
}

EvolutionGrid::EvolutionGrid(const StateVector& psi0, const Hamiltonian& h,
                             const EvolverSpec& evolver, double t_figure, int refine,
                             double span_factor, std::size_t state_budget)
    : h_(&h), evolver_(evolver), t_figure_(t_figure) {
    evolver_.validate();
    if (evolver_.kind == EvolverSpec::Kind::Lor)
        throw ValidationError("the quadrature engine needs a deterministic backend");
    if (psi0.n_qubits() != h.n_qubits()) throw ValidationError("EvolutionGrid: dimension mismatch");
    grid_ = standard_grid(t_figure, refine, span_factor);
    const std::size_t k_count = grid_.t.size();
    const std::size_t state_bytes = psi0.dim() * sizeof(cplx);

    auto evolve_to = [&](double t) { return evolve(psi0, h, t, evolver_); };

    p_ = Eigen::MatrixXcd::Zero(k_count, k_count);
    q_ = Eigen::MatrixXcd::Zero(k_count, k_count);

    if (k_count * state_bytes <= state_budget) {
        states_.reserve(k_count);
        for (double t : grid_.t) states_.push_back(evolve_to(t));
        for (std::size_t k = 0; k < k_count; ++k) {
            const StateVector hk = apply_hamiltonian(states_[k], h);
            for (std::size_t kp_ = 0; kp_ <= k; ++kp_) {
                p_(kp_, k) = inner(states_[kp_], states_[k]);
                q_(kp_, k) = inner(states_[kp_], hk);
                p_(k, kp_) = std::conj(p_(kp_, k));
                q_(k, kp_) = std::conj(q_(kp_, k));
            }
        }
    } else {
        // block accumulation: hold a stripe of bras, recompute kets
        const std::size_t block = std::max<std::size_t>(1, state_budget / (2 * state_bytes));
        for (std::size_t lo = 0; lo < k_count; lo += block) {
            const std::size_t hi = std::min(k_count, lo + block);
            std::vector<StateVector> bras;
            bras.reserve(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) bras.push_back(evolve_to(grid_.t[i]));
            for (std::size_t k = lo; k < k_count; ++k) {
                const StateVector ket = (k >= lo && k < hi) ? bras[k - lo] : evolve_to(grid_.t[k]);
                const StateVector hk = apply_hamiltonian(ket, h);
                for (std::size_t i = lo; i < hi && i <= k; ++i) {
                    p_(i, k) = inner(bras[i - lo], ket);
                    q_(i, k) = inner(bras[i - lo], hk);
                    p_(k, i) = std::conj(p_(i, k));
                    q_(k, i) = std::conj(q_(i, k));
                }
            }
        }
    }
}

const StateVector& EvolutionGrid::state(std::size_t k) const {
    if (states_.empty()) throw ComputeError("grid states were not stored (over budget)");
    return states_.at(k);
}

Eigen::MatrixXcd EvolutionGrid::observable_gram(const ObservableDecomposition& obs) const {
    obs.validate();
    if (states_.empty())
        throw ComputeError("observable_gram needs stored states; rerun with a larger budget");
    const std::size_t k_count = states_.size();
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(k_count, k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        StateVector ok(states_[k].n_qubits());
        auto acc = ok.amplitudes();
        std::fill(acc.begin(), acc.end(), cplx{0.0, 0.0});
        for (const auto& term : obs.terms) {
            const StateVector t = apply_pauli(states_[k], term.op);
            const auto src = t.amplitudes();
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term.a * src[i];
        }
        for (std::size_t kp_ = 0; kp_ <= k; ++kp_) {
            gram(kp_, k) = inner(states_[kp_], ok);
            gram(k, kp_) = std::conj(gram(kp_, k));
        }
    }
    return gram;
}

Eigen::VectorXcd EvolutionGrid::coefficients(double beta, double tau, double e0) const {
    KernelParams kp{beta, tau, e0, t_figure_};
    kp.validate();
    if (beta == 0.0) throw ValidationError("grid coefficients need beta > 0");
    Eigen::VectorXcd c(grid_.t.size());
    for (std::size_t k = 0; k < grid_.t.size(); ++k)
        c(k) = grid_.step * g_density(kp, grid_.t[k]) * std::exp(cplx{0.0, e0 * grid_.t[k]});
    return c;
}

double EvolutionGrid::denominator(double beta, double tau, double e0) const {
    const Eigen::VectorXcd c = coefficients(beta, tau, e0);
    return std::real((c.adjoint() * p_ * c).value());
}

double EvolutionGrid::rayleigh(const Eigen::MatrixXcd& num_gram, double beta, double tau,
                               double e0) const {
    const Eigen::VectorXcd c = coefficients(beta, tau, e0);
    const double den = std::real((c.adjoint() * p_ * c).value());
    if (!(den > 0.0))
        throw ComputeError("quadrature denominator vanished (beta too large for this grid)");
    return std::real((c.adjoint() * num_gram * c).value()) / den;
}

double EvolutionGrid::its_energy(double beta, double tau, double e0) const {
    return rayleigh(q_, beta, tau, e0);
}

double EvolutionGrid::numerator(const Eigen::MatrixXcd& num_gram, double beta, double tau,
                                double e0) const {
    const Eigen::VectorXcd c = coefficients(beta, tau, e0);
    return std::real((c.adjoint() * num_gram * c).value());
}

namespace {

double plain_expectation(const StateVector& psi, const ObservableDecomposition& obs) {
    cplx num{0.0, 0.0};
    for (const auto& term : obs.terms) num += term.a * matrix_element(psi, term.op, psi);
    const cplx den = inner(psi, psi);
    return num.real() / den.real();
}

}  // namespace

double quadrature_its(const StateVector& psi0, const Hamiltonian& h,
                      const ObservableDecomposition& obs, const KernelParams& kp,
                      const EvolverSpec& evolver, int refine) {
    obs.validate();
    kp.validate();
    if (kp.beta == 0.0) return plain_expectation(psi0, obs);
    if (!kp.truncated()) throw ValidationError("quadrature_its needs a finite T (grid span)");
    EvolutionGrid grid(psi0, h, evolver, kp.t_trunc, refine);
    return grid.rayleigh(grid.observable_gram(obs), kp.beta, kp.tau, kp.e0);
}

double exact_its(const StateVector& psi0, const Hamiltonian& h,
                 const ObservableDecomposition& obs, double beta) {
    obs.validate();
    if (beta == 0.0) return plain_expectation(psi0, obs);
    const StateVector phi = imaginary_exact_evolve(psi0, h, beta, 0.0);
    return plain_expectation(phi, obs);
}

}  // namespace qcmc
