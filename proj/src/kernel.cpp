#include "qcmc/kernel.hpp"

#include <cmath>
#include <numbers>

#include "qcmc/special.hpp"

namespace qcmc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
}  // namespace

void KernelParams::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("kernel: beta must be >= 0 and finite");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("kernel: tau must be > 0 and finite");
    if (!std::isfinite(e0)) throw ValidationError("kernel: E0 must be finite");
    if (!(t_trunc > 0.0)) throw ValidationError("kernel: T must be > 0 (may be infinite)");
}

double KernelParams::normalisation() const {
    validate();
    return qcmc::erfc(beta / (kSqrt2 * tau));
}

double KernelParams::gamma_t() const {
    validate();
    if (!truncated()) throw ValidationError("gamma_T needs a finite truncation time");
    if (beta == 0.0) throw ValidationError("gamma_T needs beta > 0");
    return kSqrt2 * tau / (std::sqrt(kPi) * beta) * std::exp(-t_trunc * t_trunc / (2.0 * tau * tau));
}

double g_density(const KernelParams& kp, double t) {
    kp.validate();
    if (kp.beta == 0.0)
        throw ValidationError("g(t) is degenerate at beta = 0 (e^{-beta H} = 1 handled upstream)");
    const double b2 = kp.beta * kp.beta;
    return kp.beta / (kPi * (b2 + t * t)) * std::exp(-(b2 + t * t) / (2.0 * kp.tau * kp.tau));
}

double g_hat(const KernelParams& kp, double omega) {
    kp.validate();
    if (kp.beta == 0.0) return 1.0;  // delta-kernel limit
    const double tau2 = kp.tau * kp.tau;
    // common Gaussian factor exp(-(beta^2 + w^2 tau^4)/(2 tau^2))
    const double expo = -(kp.beta * kp.beta + omega * omega * tau2 * tau2) / (2.0 * tau2);
    const double gauss = std::exp(expo);
    double total = 0.0;
    for (const double eta : {+1.0, -1.0}) {
        const double u = (kp.beta + eta * omega * tau2) / (kSqrt2 * kp.tau);
        if (u >= 0.0) {
            // e^{eta beta w} erfc(u) = erfcx(u) e^{expo}
            total += 0.5 * erfcx(u) * gauss;
        } else {
            // erfc(u) = 2 - erfc(-u); the leading term e^{eta beta w} cannot
            // overflow because u < 0 forces eta*omega < -beta/tau^2 < 0
            total += std::exp(eta * kp.beta * omega) - 0.5 * erfcx(-u) * gauss;
        }
    }
    return total;
}

double gamma_g(const KernelParams& kp, double delta_e) {
    kp.validate();
    if (!(delta_e >= kp.beta / (kp.tau * kp.tau)))
        throw ValidationError("gamma_G bound invalid: requires dE >= beta/tau^2");
    return std::exp(-0.5 * delta_e * delta_e * kp.tau * kp.tau);
}

double sample_time(const KernelParams& kp, Rng& rng, long* attempts) {
    kp.validate();
    if (kp.beta == 0.0) return 0.0;
    const double inv_2tau2 = 1.0 / (2.0 * kp.tau * kp.tau);
    for (;;) {
        // Cauchy(beta) proposal; the Gaussian acceptance leaves g/C exactly
        const double t = kp.beta * std::tan(kPi * (rng.uniform() - 0.5));
        if (attempts) ++*attempts;
        if (kp.truncated() && std::abs(t) > kp.t_trunc) continue;
        if (rng.uniform() < std::exp(-t * t * inv_2tau2)) return t;
    }
}

bool pointwise_bound_check(const KernelParams& kp, double omega, double rel_tol) {
    kp.validate();
    if (!(omega > kp.beta / (kp.tau * kp.tau)))
        throw ValidationError("pointwise bound check requires omega > beta/tau^2");
    const double tau2 = kp.tau * kp.tau;
    const double lhs = std::abs(g_hat(kp, omega) - std::exp(-kp.beta * omega));
    const double rhs = std::exp(-(kp.beta * kp.beta + omega * omega * tau2 * tau2) / (2.0 * tau2));
    return lhs <= rhs * (1.0 + rel_tol) + 1e-300;
}

TimeGrid midpoint_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi > lo)) throw ValidationError("midpoint grid: need hi > lo and step > 0");
    const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step));
    if (count < 1 || count > 100000000) throw ValidationError("midpoint grid: unreasonable point count");
    TimeGrid grid;
    grid.step = (hi - lo) / static_cast<double>(count);
    grid.t.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        grid.t[k] = lo + (static_cast<double>(k) + 0.5) * grid.step;
    return grid;
}

TimeGrid standard_grid(double t_figure, int refine, double span_factor) {
    if (!(t_figure > 0.0) || !std::isfinite(t_figure))
        throw ValidationError("standard grid needs a finite positive T");
    if (refine < 1) throw ValidationError("grid refinement must be >= 1");
    const double step = t_figure / (20.0 * refine);
    return midpoint_grid(-span_factor * t_figure, span_factor * t_figure, step);
}

}  // namespace qcmc
