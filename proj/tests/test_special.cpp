#include "doctest.h"
#include "qcmc/special.hpp"

#include <cmath>

namespace {

struct Ref {
    double x;
    double erfc_val;
    double erfcx_val;
};

// 40-digit mpmath references, rounded to double
constexpr Ref kRefs[] = {
    {0.0, 1.0, 1.0},
    {1e-8, 0.9999999887162083290449, 0.9999999887162084290449},
    {0.01, 0.9887165844441503830841, 0.9888154610463425105603},
    {0.1, 0.8875370839817151077967, 0.8964569799691266419319},
    {0.3, 0.6713732405408725723611, 0.7345993345676551422857},
    {0.5, 0.4795001221869534623173, 0.6156903441929258748708},
    {0.7, 0.3221988061625815270244, 0.5259303373494409410779},
    {0.9, 0.2030917875771678714813, 0.4565316513231170393314},
    {1.0, 0.1572992070502851306588, 0.4275835761558070044108},
    {1.1, 0.1197949304259183002281, 0.401730460636495096489},
    {1.3, 0.06599205505934756339611, 0.357642669086090317647},
    {1.5, 0.03389485352468927293302, 0.3215854164543175023543},
    {1.75, 0.01332832878081755622779, 0.2849722347374363892092},
    {2.0, 0.004677734981047265837931, 0.2553956763105057438651},
    {2.25, 0.001462716586681151697911, 0.2310872587303918699575},
    {2.5, 0.0004069520174449589395642, 0.2108063640611435806471},
    {2.75, 0.0001006219221196368369044, 0.1936620962790686786027},
    {3.0, 0.00002209049699858544137278, 0.1790011511813899504193},
    {3.25, 0.000004302779463675121830476, 0.1663353484268218767634},
    {3.5, 7.430983723414127455237e-7, 0.1552936556088942974027},
    {4.0, 1.541725790028001885216e-8, 0.1369994576250613898894},
    {5.0, 1.537459794428034850188e-12, 0.1107046377330686263702},
    {6.5, 3.842148327120647469876e-20, 0.08580567010489460177789},
    {8.0, 1.122429717298292707997e-29, 0.06998516620088092772275},
    {10.0, 2.088487583762544757001e-45, 0.05614099274382258585752},
    {15.0, 7.212994172451206666565e-100, 0.03752960638850576574606},
    {26.0, 5.663192408856142846476e-296, 0.02168358485056290661617},
    {50.0, 0.0, 0.01128153626532377250018},  // erfc underflows
    {1000.0, 0.0, 0.0005641893014533876541997},
};

double rel_err(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("erfcx matches high-precision references to 1e-12") {
    for (const auto& r : kRefs) {
        CAPTURE(r.x);
        CHECK(rel_err(qcmc::erfcx(r.x), r.erfcx_val) < 1e-12);
    }
}

TEST_CASE("erfc matches high-precision references to 1e-12") {
    for (const auto& r : kRefs) {
        CAPTURE(r.x);
        if (r.erfc_val == 0.0) {
            CHECK(qcmc::erfc(r.x) < 1e-290);
        } else {
            CHECK(rel_err(qcmc::erfc(r.x), r.erfc_val) < 1e-12);
        }
    }
}

TEST_CASE("negative arguments via reflection") {
    for (const auto& r : kRefs) {
        if (r.x == 0.0) continue;
        CAPTURE(r.x);
        CHECK(rel_err(qcmc::erfc(-r.x), 2.0 - r.erfc_val) < 1e-13);
    }
    // erfcx(-x) = 2 e^{x^2} - erfcx(x)
    CHECK(rel_err(qcmc::erfcx(-1.0), 2.0 * std::exp(1.0) - 0.4275835761558070044108) < 1e-13);
    CHECK(std::isinf(qcmc::erfcx(-30.0)));
}

TEST_CASE("identity erfc(x) = erfcx(x) exp(-x^2) in the midrange") {
    for (double x = 0.05; x < 6.0; x += 0.173) {
        CAPTURE(x);
        CHECK(rel_err(qcmc::erfc(x), qcmc::erfcx(x) * std::exp(-x * x)) < 1e-12);
    }
}
