#include "doctest.h"
#include "qcmc/estimator.hpp"

#include <cmath>
#include <filesystem>

#include "qcmc/dense.hpp"

using namespace qcmc;

namespace {

ModelSpec tfi_spec(int n, double lambda) {
    ModelSpec s;
    s.family = ModelSpec::Family::Tfi1d;
    s.n_spin = n;
    s.lambda = lambda;
    return s;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("two-time correlation basics") {
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const EvolverSpec exact{EvolverSpec::Kind::Exact, 1};

    const auto id = ObservableDecomposition::identity(2);
    CHECK(std::abs(two_time_correlation(psi, h, id, 0.0, 0.0, 0.3, exact) - cplx{1.0, 0.0}) < 1e-14);

    const auto ho = ObservableDecomposition::from_hamiltonian(h);
    const cplx at_zero = two_time_correlation(psi, h, ho, 0.0, 0.0, 0.0, exact);
    CHECK(at_zero.real() == doctest::Approx(expectation(psi, h)));
    CHECK(std::abs(at_zero.imag()) < 1e-12);

    // E0 enters only through the phase e^{iE0(t-t')}
    const cplx base = two_time_correlation(psi, h, ho, 0.7, -0.4, 0.0, exact);
    const cplx shifted = two_time_correlation(psi, h, ho, 0.7, -0.4, 1.3, exact);
    CHECK(std::abs(shifted - base * std::exp(cplx{0.0, 1.3 * 1.1})) < 1e-12);
}

TEST_CASE("hadamard shots") {
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        CHECK(hadamard_shot(rng, 1.0) == 1);
        CHECK(hadamard_shot(rng, -1.0) == -1);
    }
    long sum = 0;
    const long n = 100000;
    for (long i = 0; i < n; ++i) sum += hadamard_shot(rng, 0.0);
    CHECK(std::abs(static_cast<double>(sum)) < 5.0 * std::sqrt(static_cast<double>(n)));
    CHECK_THROWS_AS(hadamard_shot(rng, 1.5), ComputeError);
}

TEST_CASE("estimator at beta = 0 is exact") {
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    KernelParams kp{0.0, 2.0, 0.0, kInf};
    Rng rng(3);
    const auto est = estimate_itc(psi, h, ObservableDecomposition::identity(2), kp, 50, 1,
                                  {EvolverSpec::Kind::Exact, 1}, ShotModel::ExactExpectation, rng);
    CHECK(est.value.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(est.value.imag() == doctest::Approx(0.0));
    CHECK(est.norm_factor == doctest::Approx(1.0));
}

TEST_CASE("algorithm-1 estimator is unbiased against the quadrature engine") {
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const KernelParams kp{1.0, 2.0, -2.2, 12.0};
    const EvolverSpec exact{EvolverSpec::Kind::Exact, 1};
    const auto obs = ObservableDecomposition::from_hamiltonian(h);

    // deterministic reference: <H>_G(-i beta, i beta) on the grid
    EvolutionGrid grid(psi, h, exact, kp.t_trunc, 4);
    const double ref = grid.numerator(grid.hamiltonian_gram(), kp.beta, kp.tau, kp.e0);

    Rng rng(17);
    const int seeds = 60;
    const long n_s = 400;
    double mean = 0.0, var_acc = 0.0;
    std::vector<double> values;
    for (int s = 0; s < seeds; ++s) {
        Rng seed_rng = rng.derive(s);
        const auto est = estimate_itc(psi, h, obs, kp, n_s, 1, exact, ShotModel::Shots, seed_rng);
        values.push_back(est.value.real());
        mean += est.value.real();
    }
    mean /= seeds;
    for (double v : values) var_acc += (v - mean) * (v - mean);
    const double se_pooled = std::sqrt(var_acc / (seeds - 1) / seeds);
    CHECK(std::abs(mean - ref) < 5.0 * se_pooled);

    // variance bound 2 a_O^2 C^4 / N_s across seeds
    const double c = kp.normalisation();
    const double bound = 2.0 * obs.a_o() * obs.a_o() * std::pow(c, 4) / n_s;
    CHECK(var_acc / (seeds - 1) <= bound);
}

TEST_CASE("reported variance matches the across-seed spread") {
    const auto spec = tfi_spec(2, 0.8);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const KernelParams kp{1.0, 2.0, 0.0, 12.0};
    const EvolverSpec exact{EvolverSpec::Kind::Exact, 1};
    Rng rng(99);
    double reported = 0.0, spread = 0.0, mean = 0.0;
    const int seeds = 40;
    std::vector<double> vals;
    for (int s = 0; s < seeds; ++s) {
        Rng seed_rng = rng.derive(s);
        const auto est = estimate_itc(psi, h, ObservableDecomposition::identity(2), kp, 300, 1,
                                      exact, ShotModel::Shots, seed_rng);
        vals.push_back(est.value.real());
        mean += est.value.real();
        reported += est.variance;
    }
    mean /= seeds;
    reported /= seeds;
    for (double v : vals) spread += (v - mean) * (v - mean);
    spread /= (seeds - 1);
    CHECK(reported == doctest::Approx(spread).epsilon(0.5));  // chi^2 spread at 40 seeds
}

TEST_CASE("mean invariant under shot regrouping (N_s M_s fixed)") {
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const KernelParams kp{0.8, 1.6, -2.0, 10.0};
    const EvolverSpec exact{EvolverSpec::Kind::Exact, 1};
    const auto obs = ObservableDecomposition::from_hamiltonian(h);
    Rng rng(7);
    double m1 = 0.0, m2 = 0.0, v1 = 0.0, v2 = 0.0;
    const int seeds = 40;
    std::vector<double> a1, a2;
    for (int s = 0; s < seeds; ++s) {
        Rng ra = rng.derive(2 * s);
        Rng rb = rng.derive(2 * s + 1);
        a1.push_back(
            estimate_itc(psi, h, obs, kp, 800, 1, exact, ShotModel::Shots, ra).value.real());
        a2.push_back(
            estimate_itc(psi, h, obs, kp, 80, 10, exact, ShotModel::Shots, rb).value.real());
        m1 += a1.back();
        m2 += a2.back();
    }
    m1 /= seeds;
    m2 /= seeds;
    for (int s = 0; s < seeds; ++s) {
        v1 += (a1[s] - m1) * (a1[s] - m1);
        v2 += (a2[s] - m2) * (a2[s] - m2);
    }
    const double se = std::sqrt((v1 + v2) / (seeds - 1) / seeds);
    CHECK(std::abs(m1 - m2) < 5.0 * se);
}

TEST_CASE("lor estimator is unbiased against the truncated quadrature oracle") {
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const KernelParams kp{1.0, 2.0, 0.0, 3.0};  // finite T required
    const EvolverSpec lor{EvolverSpec::Kind::Lor, 5};
    const auto obs = ObservableDecomposition::from_hamiltonian(h);

    // oracle: <H>_{G_T} with the exact backend on a fine [-T, T] grid
    EvolutionGrid grid(psi, h, {EvolverSpec::Kind::Exact, 1}, kp.t_trunc, 8, 1.0);
    const double ref = grid.numerator(grid.hamiltonian_gram(), kp.beta, kp.tau, kp.e0);

    Rng rng(31);
    const auto est = estimate_itc(psi, h, obs, kp, 60000, 1, lor, ShotModel::Shots, rng);
    CHECK(std::abs(est.value.real() - ref) < 5.0 * est.std_error);

    // variance bound with C_T
    const double bound = 2.0 * obs.a_o() * obs.a_o() * std::pow(est.norm_factor, 4) / 60000.0;
    CHECK(est.variance <= bound);
}

TEST_CASE("its ratio estimator and the denominator guard") {
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const EvolverSpec exact{EvolverSpec::Kind::Exact, 1};
    const auto obs = ObservableDecomposition::from_hamiltonian(h);

    // beta = 0: plain expectation within statistical error
    KernelParams kp0{0.0, 2.0, 0.0, kInf};
    Rng rng(11);
    const auto r0 = estimate_its(psi, h, obs, kp0, 400, 1, exact, ShotModel::Shots, rng);
    CHECK(std::abs(r0.value - expectation(psi, h)) <
          5.0 * (r0.numerator.std_error + std::abs(r0.value) * r0.denominator.std_error));

    // wildly detuned E0 scrambles the phases: denominator unresolved
    KernelParams bad{2.0, 4.0, 60.0, kInf};
    Rng rng2(12);
    CHECK_THROWS_AS(estimate_its(psi, h, obs, bad, 300, 1, exact, ShotModel::Shots, rng2),
                    ComputeError);
}

TEST_CASE("average phase reflects the ground-state overlap") {
    // with E0 close to E_g and tau large (gamma_G small), the average phase
    // stays above 0.9 p_g / sqrt(2)
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const GroundReference ground = lanczos_ground(h, psi);
    const double beta = 1.5;
    KernelParams kp{beta, 150.0, ground.energy - 0.01, kInf};
    Rng rng(21);
    const auto est = estimate_itc(psi, h, ObservableDecomposition::identity(2), kp, 20000, 1,
                                  {EvolverSpec::Kind::Exact, 1}, ShotModel::Shots, rng);
    CHECK(std::abs(est.average_phase) >= 0.9 * ground.overlap_sq / std::numbers::sqrt2);
    CHECK(std::abs(est.average_phase) <= 1.0 + 1e-12);
}

TEST_CASE("quadrature its approaches the exact imaginary-time value") {
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const auto obs = ObservableDecomposition::from_hamiltonian(h);
    const GroundReference ground = lanczos_ground(h, psi);

    // beta = 0
    KernelParams kp0{0.0, 10.0, 0.0, 20.0};
    CHECK(quadrature_its(psi, h, obs, kp0, {EvolverSpec::Kind::Exact, 1}) ==
          doctest::Approx(expectation(psi, h)).epsilon(1e-12));

    // wide Gaussian, E0 below E_g: matches exact e^{-beta H} Rayleigh quotient
    KernelParams kp{1.0, 60.0, ground.energy - 0.1, 40.0};
    const double quad = quadrature_its(psi, h, obs, kp, {EvolverSpec::Kind::Exact, 1}, 8);
    const double exact = exact_its(psi, h, obs, 1.0);
    CHECK(quad == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("evolution grid: streaming blocks reproduce the stored-state grams") {
    const auto spec = tfi_spec(3, 1.1);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const EvolverSpec tr{EvolverSpec::Kind::Trotter1, 6};
    EvolutionGrid stored(psi, h, tr, 1.0, 1);
    EvolutionGrid streamed(psi, h, tr, 1.0, 1, 10.0, /*state_budget=*/1);
    CHECK(stored.states_stored());
    CHECK(!streamed.states_stored());
    CHECK((stored.overlap_gram() - streamed.overlap_gram()).norm() == 0.0);
    CHECK((stored.hamiltonian_gram() - streamed.hamiltonian_gram()).norm() == 0.0);
    CHECK_THROWS_AS(streamed.observable_gram(ObservableDecomposition::identity(3)), ComputeError);
}

TEST_CASE("sample cache: file round trip and re-phasing identity") {
    const auto spec = tfi_spec(2, 1.0);
    const Hamiltonian h = build_model(spec);
    const StateVector psi = initial_state(spec);
    const KernelParams kp{1.0, 2.0, 0.0, 8.0};
    Rng rng(5);
    SampleCache cache;
    const auto est = estimate_itc(psi, h, ObservableDecomposition::from_hamiltonian(h), kp, 200, 2,
                                  {EvolverSpec::Kind::Exact, 1}, ShotModel::Shots, rng, &cache);
    // E0 = 0 re-phasing reproduces the estimator output bit-for-bit
    CHECK(cache.estimate(0.0) == est.value);

    const auto path = std::filesystem::temp_directory_path() / "qcmc_cache_test.txt";
    cache.observable = "hbar";
    cache.save(path.string());
    const SampleCache back = SampleCache::load(path.string());
    REQUIRE(back.records.size() == cache.records.size());
    CHECK(std::abs(back.estimate(0.7) - cache.estimate(0.7)) < 1e-12);
    std::filesystem::remove(path);
}
