#include "doctest.h"
#include "qcmc/state.hpp"

#include <cmath>
#include <filesystem>

#include "qcmc/dense.hpp"
#include "qcmc/rng.hpp"

using namespace qcmc;

namespace {

StateVector random_state(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> a(std::size_t{1} << n);
    for (auto& x : a) x = cplx{rng.normal(), rng.normal()};
    StateVector psi(n, std::move(a), false);
    psi.normalise();
    return psi;
}

}  // namespace

TEST_CASE("apply_pauli on basis states") {
    // X|0> = |1>
    StateVector psi(1);
    apply_pauli_inplace(psi, PauliString("X"));
    CHECK(psi.amplitudes()[1] == cplx{1.0, 0.0});
    // Y|0> = i|1>
    StateVector psi2(1);
    apply_pauli_inplace(psi2, PauliString("Y"));
    CHECK(psi2.amplitudes()[1] == cplx{0.0, 1.0});
    // Z on |+> flips the |1> sign
    StateVector plus = StateVector::plus_state(1);
    apply_pauli_inplace(plus, PauliString("Z"));
    CHECK(plus.amplitudes()[0].real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(plus.amplitudes()[1].real() == doctest::Approx(-1 / std::sqrt(2.0)));
}

TEST_CASE("apply_pauli agrees with dense matrices") {
    Rng rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        PauliString p(3);
        for (int q = 0; q < 3; ++q) p.set_axis(q, static_cast<Axis>(rng.below(4)));
        const StateVector psi = random_state(3, 100 + trial);
        const StateVector got = apply_pauli(psi, p);
        const Vector want = to_dense(p) * to_vector(psi);
        for (std::size_t i = 0; i < psi.dim(); ++i)
            CHECK(std::abs(got.amplitudes()[i] - want(i)) < 1e-12);
    }
}

TEST_CASE("real pauli exponential: unitarity and inverses") {
    const StateVector psi = random_state(4, 9);
    PauliString p("XYIZ");
    const StateVector rotated = apply_exp_pauli(psi, p, 0.37, ExpMode::Real);
    CHECK(rotated.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const StateVector back = apply_exp_pauli(rotated, p, -0.37, ExpMode::Real);
    for (std::size_t i = 0; i < psi.dim(); ++i)
        CHECK(std::abs(back.amplitudes()[i] - psi.amplitudes()[i]) < 1e-12);
    // theta = 0 is the identity
    const StateVector same = apply_exp_pauli(psi, p, 0.0, ExpMode::Real);
    for (std::size_t i = 0; i < psi.dim(); ++i)
        CHECK(same.amplitudes()[i] == psi.amplitudes()[i]);
}

TEST_CASE("diagonal rotation picks up the right phase") {
    // exp(-i pi/4 Z)|0> = e^{-i pi/4}|0>
    StateVector psi(1);
    apply_exp_pauli_inplace(psi, PauliString("Z"), 3.141592653589793 / 4, ExpMode::Real);
    CHECK(psi.amplitudes()[0].real() == doctest::Approx(std::cos(3.141592653589793 / 4)));
    CHECK(psi.amplitudes()[0].imag() == doctest::Approx(-std::sin(3.141592653589793 / 4)));
}

TEST_CASE("imaginary pauli exponential") {
    // exp(-theta X)|0> = cosh(theta)|0> - sinh(theta)|1>, norm^2 = cosh(2 theta)
    StateVector psi(1);
    apply_exp_pauli_inplace(psi, PauliString("X"), 1.0, ExpMode::Imaginary);
    CHECK(!psi.normalised());
    CHECK(psi.amplitudes()[0].real() == doctest::Approx(std::cosh(1.0)));
    CHECK(psi.amplitudes()[1].real() == doctest::Approx(-std::sinh(1.0)));
    CHECK(psi.norm() * psi.norm() == doctest::Approx(std::cosh(2.0)));

    // inverse: exp(+theta X) exp(-theta X) = 1
    apply_exp_pauli_inplace(psi, PauliString("X"), -1.0, ExpMode::Imaginary);
    CHECK(psi.amplitudes()[0].real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(psi.amplitudes()[1]) < 1e-10);
}

TEST_CASE("inner products and expectations") {
    const StateVector zero(2);
    CHECK(inner(zero, zero) == cplx{1.0, 0.0});

    // <+|Z|+> = 0
    const StateVector plus = StateVector::plus_state(1);
    const Hamiltonian hz = parse_hamiltonian_text("1 Z\n");
    CHECK(expectation(plus, hz) == doctest::Approx(0.0));

    // <++|H|++> for TFI n=2 lambda=1: X part gives -2, ZZ gives 0
    ModelSpec s;
    s.family = ModelSpec::Family::Tfi1d;
    s.n_spin = 2;
    s.lambda = 1.0;
    const Hamiltonian h = build_model(s);
    CHECK(expectation(StateVector::plus_state(2), h) == doctest::Approx(-2.0));

    CHECK_THROWS_AS(expectation(StateVector(1), hz) + expectation(StateVector(2), hz),
                    ValidationError);  // dimension mismatch
}

TEST_CASE("initial states match their definitions") {
    ModelSpec tfi;
    tfi.family = ModelSpec::Family::Tfi1d;
    tfi.n_spin = 2;
    tfi.lambda = 1.0;
    const StateVector plus2 = initial_state(tfi);
    for (const auto& a : plus2.amplitudes()) CHECK(a.real() == doctest::Approx(0.5));

    ModelSpec afh;
    afh.family = ModelSpec::Family::Afh1d;
    afh.n_spin = 2;
    afh.lambda = 1.0;
    const StateVector singlet = initial_state(afh);
    CHECK(std::abs(singlet.amplitudes()[0]) < 1e-15);
    CHECK(singlet.amplitudes()[1].real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(singlet.amplitudes()[2].real() == doctest::Approx(-1 / std::sqrt(2.0)));
    CHECK(std::abs(singlet.amplitudes()[3]) < 1e-15);

    ModelSpec rnd;
    rnd.family = ModelSpec::Family::RandomK;
    rnd.n_spin = 3;
    rnd.n_term = 4;
    const StateVector zero = initial_state(rnd);
    CHECK(zero.amplitudes()[0] == cplx{1.0, 0.0});
    for (std::size_t i = 1; i < zero.dim(); ++i) CHECK(std::abs(zero.amplitudes()[i]) < 1e-15);
}

TEST_CASE("fermi-hubbard initial state: normalised, two particles per pair") {
    ModelSpec fh;
    fh.family = ModelSpec::Family::Fh1d;
    fh.n_site = 2;
    fh.lambda = 0.5;
    const StateVector psi = initial_state(fh);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // occupation: one up + one down on sites {0,1}; basis qubits 0,1 = up, 2,3 = down
    for (std::size_t b = 0; b < psi.dim(); ++b) {
        if (std::abs(psi.amplitudes()[b]) < 1e-14) continue;
        const int up = (b & 1) + ((b >> 1) & 1);
        const int down = ((b >> 2) & 1) + ((b >> 3) & 1);
        CHECK(up == 1);
        CHECK(down == 1);
    }
    // the pair operator creates (up@0,down@1) and (up@1,down@0) with weight 1/sqrt(2)
    CHECK(std::abs(psi.amplitudes()[0b1001]) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(std::abs(psi.amplitudes()[0b0110]) == doctest::Approx(1 / std::sqrt(2.0)));
}

TEST_CASE("lanczos ground reference: analytic cases") {
    // H = sigma_z from |+>: E_g = -1, gap = 2
    const Hamiltonian hz = parse_hamiltonian_text("1 Z\n");
    const GroundReference gz = lanczos_ground(hz, StateVector::plus_state(1));
    CHECK(gz.energy == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(gz.gap == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(gz.overlap_sq == doctest::Approx(0.5).epsilon(1e-9));

    // H = sigma_x + sigma_z: E_g = -sqrt(2)
    const Hamiltonian hxz = parse_hamiltonian_text("1 X\n1 Z\n");
    const GroundReference gxz = lanczos_ground(hxz, StateVector(1));
    CHECK(gxz.energy == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-10));
    CHECK(gxz.gap == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("lanczos converges from an exact eigenvector (restart rule)") {
    const Hamiltonian hz = parse_hamiltonian_text("1 Z\n");
    // |0> is the excited eigenstate; the solver must still find E_g = -1
    const GroundReference g = lanczos_ground(hz, StateVector(1));
    CHECK(g.energy == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(g.overlap_sq == doctest::Approx(0.0));
}

TEST_CASE("lanczos matches dense diagonalisation across models") {
    std::vector<ModelSpec> specs;
    ModelSpec tfi;
    tfi.family = ModelSpec::Family::Tfi1d;
    tfi.n_spin = 8;
    tfi.lambda = 1.2;
    specs.push_back(tfi);
    ModelSpec afh;
    afh.family = ModelSpec::Family::Afh1d;
    afh.n_spin = 6;
    afh.lambda = 0.9;
    specs.push_back(afh);
    ModelSpec rnd;
    rnd.family = ModelSpec::Family::Random2;
    rnd.n_spin = 6;
    rnd.n_term = 10;
    rnd.seed = 21;
    specs.push_back(rnd);

    for (const auto& s : specs) {
        const Hamiltonian h = build_model(s);
        const GroundReference g = lanczos_ground(h, initial_state(s), 1e-11);
        auto eig = dense_eigen_cached(h);
        CAPTURE(s.name());
        CHECK(g.energy == doctest::Approx(eig->values(0)).epsilon(1e-9));
        CHECK(g.gap == doctest::Approx(eig->values(1) - eig->values(0)).epsilon(1e-7));
        // residual contract
        CHECK(g.residual <= 1e-11 * std::max(1.0, h.h_tot()));
    }
}

TEST_CASE("tfi1d n=10 lambda=1.2 gap is about 0.8") {
    ModelSpec s;
    s.family = ModelSpec::Family::Tfi1d;
    s.n_spin = 10;
    s.lambda = 1.2;
    const GroundReference g = lanczos_ground(build_model(s), initial_state(s));
    CHECK(g.gap == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("memory guard refuses oversized states") {
    CHECK_THROWS_AS(StateVector(27), ResourceError);
}

TEST_CASE("state dump round trip") {
    const StateVector psi = random_state(3, 77);
    const auto path = std::filesystem::temp_directory_path() / "qcmc_state_test.bin";
    save_state(psi, path.string());
    const StateVector back = load_state(path.string());
    REQUIRE(back.n_qubits() == 3);
    for (std::size_t i = 0; i < psi.dim(); ++i)
        CHECK(back.amplitudes()[i] == psi.amplitudes()[i]);
    std::filesystem::remove(path);
}
