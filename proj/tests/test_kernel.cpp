#include "doctest.h"
#include "qcmc/kernel.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "qcmc/special.hpp"

using namespace qcmc;

namespace {

const KernelParams kRef{2.0, 4.0, 0.0, std::numeric_limits<double>::infinity()};

// straightforward quadrature of int g(t) e^{-i w t} dt on the standard grid
double g_hat_quadrature(const KernelParams& kp, double omega, double t_figure, int refine) {
    const TimeGrid grid = standard_grid(t_figure, refine);
    std::complex<double> acc{0.0, 0.0};
    for (double t : grid.t)
        acc += g_density(kp, t) * std::exp(std::complex<double>{0.0, -omega * t});
    return (acc * grid.step).real();
}

}  // namespace

TEST_CASE("g density: value, symmetry, positivity") {
    CHECK(g_density(kRef, 0.0) ==
          doctest::Approx(std::exp(-0.125) / (2.0 * std::numbers::pi)).epsilon(1e-12));
    for (double t : {0.3, 1.9, 7.2, 44.0}) {
        CHECK(g_density(kRef, t) == g_density(kRef, -t));
        CHECK(g_density(kRef, t) > 0.0);
    }
    KernelParams degenerate{0.0, 1.0, 0.0, std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(g_density(degenerate, 0.5), ValidationError);
}

TEST_CASE("normalisation: quadrature of g equals erfc(beta/(sqrt2 tau))") {
    const double c = kRef.normalisation();
    CHECK(c == doctest::Approx(qcmc::erfc(2.0 / (std::numbers::sqrt2 * 4.0))).epsilon(1e-14));
    CHECK(std::abs(g_hat_quadrature(kRef, 0.0, 6.0, 16) - c) < 1e-8);
}

TEST_CASE("g_hat matches quadrature over the acceptance window") {
    for (double w = -5.0; w <= 5.0; w += 0.5) {
        CAPTURE(w);
        CHECK(std::abs(g_hat(kRef, w) - g_hat_quadrature(kRef, w, 6.0, 16)) < 1e-6);
    }
}

TEST_CASE("g_hat: closed-form anchor points and decay") {
    CHECK(g_hat(kRef, 0.0) == doctest::Approx(kRef.normalisation()).epsilon(1e-13));
    // monotone decay far from the peak and positivity
    double prev = g_hat(kRef, 1.0);
    for (double w = 2.0; w < 40.0; w += 1.0) {
        const double cur = g_hat(kRef, w);
        CHECK(cur > 0.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("g_hat never overflows") {
    for (double beta : {1e-3, 1.0, 100.0}) {
        for (double tau : {1e-2, 1.0, 100.0}) {
            KernelParams kp{beta, tau, 0.0, std::numeric_limits<double>::infinity()};
            for (double w : {-1e6, -1e3, -1.0, 0.0, 1.0, 1e3, 1e6}) {
                const double v = g_hat(kp, w);
                CAPTURE(beta);
                CAPTURE(tau);
                CAPTURE(w);
                CHECK(std::isfinite(v));
                CHECK(v >= 0.0);
            }
        }
    }
}

TEST_CASE("gamma bounds") {
    // dE = beta/tau^2 boundary: gamma_G = e^{-beta^2/(2 tau^2)}
    CHECK(gamma_g(kRef, 2.0 / 16.0) == doctest::Approx(std::exp(-0.125)).epsilon(1e-13));
    CHECK_THROWS_AS(gamma_g(kRef, 0.1), ValidationError);  // below beta/tau^2
    // large tau kills gamma_G
    KernelParams wide{2.0, 400.0, 0.0, std::numeric_limits<double>::infinity()};
    CHECK(gamma_g(wide, 0.5) < 1e-300);

    KernelParams trunc = kRef;
    trunc.t_trunc = 12.0;
    const double expected = std::numbers::sqrt2 * 4.0 / (std::sqrt(std::numbers::pi) * 2.0) *
                            std::exp(-144.0 / 32.0);
    CHECK(trunc.gamma_t() == doctest::Approx(expected).epsilon(1e-13));
    CHECK(trunc.gamma_t() == doctest::Approx(0.01773).epsilon(1e-3));
    CHECK_THROWS_AS(kRef.gamma_t(), ValidationError);  // infinite T
}

TEST_CASE("time sampler: symmetry, truncation, moments, acceptance rate") {
    Rng rng(404);
    const long n = 200000;

    // truncated draws stay inside [-T, T]
    KernelParams trunc = kRef;
    trunc.t_trunc = 3.0;
    for (int i = 0; i < 2000; ++i) CHECK(std::abs(sample_time(trunc, rng)) <= 3.0);

    // moments against quadrature
    double mean = 0.0, second = 0.0;
    long attempts = 0;
    for (long i = 0; i < n; ++i) {
        const double t = sample_time(kRef, rng, &attempts);
        mean += t;
        second += t * t;
    }
    mean /= n;
    second /= n;

    const TimeGrid grid = standard_grid(6.0, 16);
    double num = 0.0, den = 0.0;
    for (double t : grid.t) {
        const double g = g_density(kRef, t);
        num += t * t * g;
        den += g;
    }
    const double second_ref = num / den;
    const double sigma_mean = std::sqrt(second_ref / n);
    CHECK(std::abs(mean) < 5.0 * sigma_mean);
    CHECK(second == doctest::Approx(second_ref).epsilon(0.01));

    // acceptance-rate bookkeeping: rate = C e^{beta^2/(2 tau^2)}
    const double rate = static_cast<double>(n) / static_cast<double>(attempts);
    CHECK(rate == doctest::Approx(kRef.normalisation() * std::exp(0.125)).epsilon(0.01));
}

TEST_CASE("pointwise transform bound holds on random draws") {
    Rng rng(777);
    for (int i = 0; i < 2000; ++i) {
        KernelParams kp{rng.uniform(0.05, 4.0), rng.uniform(0.2, 8.0), 0.0,
                        std::numeric_limits<double>::infinity()};
        const double floor = kp.beta / (kp.tau * kp.tau);
        const double omega = floor + rng.uniform(1e-6, 10.0);
        CAPTURE(kp.beta);
        CAPTURE(kp.tau);
        CAPTURE(omega);
        CHECK(pointwise_bound_check(kp, omega));
    }
}

TEST_CASE("grids") {
    const TimeGrid g = standard_grid(3.0, 1);
    CHECK(g.t.size() == 400);
    CHECK(g.step == doctest::Approx(0.15));
    CHECK(g.t.front() == doctest::Approx(-30.0 + 0.075));
    CHECK(g.t.back() == doctest::Approx(30.0 - 0.075));
    // symmetric midpoints
    for (std::size_t k = 0; k < g.t.size(); ++k)
        CHECK(g.t[k] == doctest::Approx(-g.t[g.t.size() - 1 - k]));
}
