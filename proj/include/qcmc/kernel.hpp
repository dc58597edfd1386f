#pragma once

#include <limits>
#include <vector>

#include "qcmc/errors.hpp"
#include "qcmc/rng.hpp"

namespace qcmc {

/// Parameters of the Lorentz-Gaussian weight
///   g(t) = (1/pi) * beta/(beta^2+t^2) * exp(-(beta^2+t^2)/(2 tau^2)),
/// the energy shift E0 of H = H_bar - E0, and the optional truncation time T
/// used by the sampled leading-order-rotation path.
struct KernelParams {
    double beta = 0.0;  // imaginary time >= 0
    double tau = 1.0;   // Gaussian width > 0
    double e0 = 0.0;
    double t_trunc = std::numeric_limits<double>::infinity();  // T > 0, may be inf

    void validate() const;
    bool truncated() const { return std::isfinite(t_trunc); }

    /// C = integral of g = erfc(beta/(sqrt(2) tau)), in (0, 1].
    double normalisation() const;

    /// Truncation-error bound gamma_T = sqrt(2) tau/(sqrt(pi) beta) e^{-T^2/(2 tau^2)}.
    double gamma_t() const;
};

/// g(t); requires beta > 0 (the beta = 0 kernel degenerates to a delta).
double g_density(const KernelParams& kp, double t);

/// Closed-form transform G(omega) = sum_{eta=+-} 1/2 e^{eta beta omega}
/// erfc((beta + eta omega tau^2)/(sqrt(2) tau)), evaluated through erfcx so
/// no exponential ever overflows. G(0) = C; G > 0 everywhere.
double g_hat(const KernelParams& kp, double omega);

/// Gaussian-modification bound gamma_G = e^{-dE^2 tau^2/2}; only valid for
/// dE >= beta/tau^2 (checked).
double gamma_g(const KernelParams& kp, double delta_e);

/// Draws t with density g(t)/C (truncated and renormalised to [-T, T] when
/// T is finite): Cauchy(beta) proposal, Gaussian acceptance. beta = 0
/// returns 0 (delta limit). `attempts`, when given, accumulates proposal
/// counts (acceptance-rate bookkeeping: rate = C e^{beta^2/(2 tau^2)} for
/// the untruncated sampler).
double sample_time(const KernelParams& kp, Rng& rng, long* attempts = nullptr);

/// Pointwise transform bound |G(w) - e^{-beta w}| <= e^{-(beta^2+w^2 tau^4)/(2 tau^2)}
/// for w > beta/tau^2; a float-tolerance wrapper used as a property oracle.
bool pointwise_bound_check(const KernelParams& kp, double omega, double rel_tol = 1e-9);

/// Uniform midpoint grid: t_k = lo + (k+1/2) step.
struct TimeGrid {
    std::vector<double> t;
    double step = 0.0;
};

TimeGrid midpoint_grid(double lo, double hi, double step);

/// The numerical-integration grid used throughout: midpoint rule with step
/// T/(20 refine) truncated at +-span_factor*T (span_factor 10 by default).
TimeGrid standard_grid(double t_figure, int refine = 1, double span_factor = 10.0);

}  // namespace qcmc
