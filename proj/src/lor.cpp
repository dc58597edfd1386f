#include "qcmc/lor.hpp"

#include <cmath>
#include <numbers>

#include "qcmc/dense.hpp"

namespace qcmc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double amplification_factor(double h_tot, double dt) {
    const double cl = h_tot * std::abs(dt);
    return std::sqrt(1.0 + cl * cl) + std::expm1(cl) - cl;
}

LorFactors lor_factors(const Hamiltonian& h, double dt) {
    if (!std::isfinite(dt)) throw ValidationError("lor_factors: non-finite dt");
    LorFactors f;
    f.c_l = h.h_tot() * std::abs(dt);
    f.phi = std::atan(f.c_l);
    f.rotation_weight = std::sqrt(1.0 + f.c_l * f.c_l);
    f.c_a = f.rotation_weight + std::expm1(f.c_l) - f.c_l;
    f.b.reserve(h.terms().size());
    for (const auto& t : h.terms())
        f.b.push_back(std::abs(t.coeff) / h.h_tot() * f.rotation_weight);
    return f;
}

namespace {

// cumulative |h_j| table for index draws j ~ |h_j|/h_tot
std::vector<double> coeff_cdf(const Hamiltonian& h) {
    std::vector<double> cdf;
    cdf.reserve(h.terms().size());
    double run = 0.0;
    for (const auto& t : h.terms()) {
        run += std::abs(t.coeff);
        cdf.push_back(run);
    }
    return cdf;
}

int draw_index(const std::vector<double>& cdf, Rng& rng) {
    const double u = rng.uniform() * cdf.back();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                     static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

// draw k >= 2 with weight x^k/k! (normalised); series truncated at relative
// machine precision, never by an arbitrary cap
int draw_pauli_order(double x, Rng& rng) {
    const double total = std::expm1(x) - x;
    const double u = rng.uniform() * total;
    double term = 0.5 * x * x;  // k = 2
    double cum = term;
    int k = 2;
    while (cum < u && term > 1e-16 * total) {
        ++k;
        term *= x / k;
        cum += term;
    }
    return k;
}

}  // namespace

LorSequence sample_lor_sequence(const Hamiltonian& h, double t, int n_t, Rng& rng) {
    if (n_t < 1) throw ValidationError("sample_lor_sequence: N_t >= 1 required");
    if (!std::isfinite(t)) throw ValidationError("sample_lor_sequence: non-finite t");
    const double dt = t / n_t;
    const LorFactors f = lor_factors(h, dt);
    const auto cdf = coeff_cdf(h);
    const double abs_dt = std::abs(dt);

    LorSequence seq;
    seq.t = t;
    seq.n_t = n_t;
    seq.steps.reserve(n_t);
    for (int l = 0; l < n_t; ++l) {
        LorStep step;
        double log_w;
        if (rng.uniform() * f.c_a < f.rotation_weight) {
            step.rotation = true;
            const int j = draw_index(cdf, rng);
            step.indices = {j};
            step.weight = f.b[j];
            step.theta = 0.0;
            log_w = std::log(step.weight);
        } else {
            step.rotation = false;
            const int k = draw_pauli_order(h.h_tot() * abs_dt, rng);
            step.indices.resize(k);
            log_w = -std::lgamma(k + 1.0) + k * std::log(abs_dt);
            int neg = 0;  // factors with h_j dt < 0 contribute +pi/2 instead of -pi/2
            for (int a = 0; a < k; ++a) {
                const int j = draw_index(cdf, rng);
                step.indices[a] = j;
                log_w += std::log(std::abs(h.terms()[j].coeff));
                if (h.terms()[j].coeff * dt < 0.0) ++neg;
            }
            step.weight = std::exp(log_w);
            step.theta = std::remainder(-0.5 * kPi * (k - 2 * neg), kTwoPi);
        }
        seq.total_theta += step.theta;
        seq.total_log_weight += log_w;
        seq.steps.push_back(std::move(step));
    }
    seq.total_theta = std::remainder(seq.total_theta, kTwoPi);
    return seq;
}

std::pair<StateVector, double> apply_lor_sequence(const StateVector& psi, const Hamiltonian& h,
                                                  const LorSequence& seq) {
    if (psi.n_qubits() != h.n_qubits()) throw ValidationError("apply_lor_sequence: dimension mismatch");
    const double dt = seq.t / seq.n_t;
    const LorFactors f = lor_factors(h, dt);
    StateVector out = psi;
    for (const auto& step : seq.steps) {
        if (step.rotation) {
            const int j = step.indices[0];
            const double sgn = (h.terms()[j].coeff * dt < 0.0) ? -1.0 : 1.0;
            apply_exp_pauli_inplace(out, h.terms()[j].string, sgn * f.phi, ExpMode::Real);
        } else {
            for (int j : step.indices) apply_pauli_inplace(out, h.terms()[j].string);
        }
    }
    return {std::move(out), seq.total_theta};
}

double c_t(const Hamiltonian& h, const KernelParams& kp, int n_t, double rel_tol) {
    kp.validate();
    if (!kp.truncated()) throw ValidationError("C_T needs a finite truncation time");
    if (kp.beta == 0.0) throw ValidationError("C_T needs beta > 0");
    if (n_t < 1) throw ValidationError("C_T: N_t >= 1 required");

    double prev = 0.0;
    for (int refine = 1; refine <= (1 << 14); refine *= 2) {
        const TimeGrid grid = midpoint_grid(-kp.t_trunc, kp.t_trunc, kp.t_trunc / (20.0 * refine));
        double sum = 0.0;
        for (double t : grid.t)
            sum += g_density(kp, t) * std::pow(amplification_factor(h.h_tot(), t / n_t), n_t);
        sum *= grid.step;
        if (refine > 1 && std::abs(sum - prev) <= rel_tol * std::abs(sum)) return sum;
        prev = sum;
    }
    throw ComputeError("C_T quadrature did not converge to the requested tolerance");
}

double rotation_only_identity_check(const Hamiltonian& h, double t, int n_t) {
    if (h.n_qubits() > 10) throw ResourceError("rotation identity check is dense-only (n <= 10)");
    if (n_t < 1) throw ValidationError("rotation identity check: N_t >= 1 required");
    const double dt = t / n_t;
    const LorFactors f = lor_factors(h, dt);
    const std::size_t dim = std::size_t{1} << h.n_qubits();

    Matrix rotation_sum = Matrix::Zero(dim, dim);
    for (std::size_t j = 0; j < h.terms().size(); ++j) {
        const double sgn = (h.terms()[j].coeff * dt < 0.0) ? -1.0 : 1.0;
        const Matrix sigma = to_dense(h.terms()[j].string);
        rotation_sum += f.b[j] * (std::cos(f.phi) * Matrix::Identity(dim, dim) -
                                  cplx{0.0, 1.0} * sgn * std::sin(f.phi) * sigma);
    }
    const Matrix one_step = Matrix::Identity(dim, dim) - cplx{0.0, 1.0} * dt * to_dense(h);

    Matrix lhs = Matrix::Identity(dim, dim), rhs = lhs;
    for (int s = 0; s < n_t; ++s) {
        lhs = rotation_sum * lhs;
        rhs = one_step * rhs;
    }
    return spectral_norm(lhs - rhs);
}

}  // namespace qcmc
