#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "swgrowth/classify.hpp"
#include "swgrowth/growth.hpp"
#include "swgrowth/sampling.hpp"

using namespace swgrowth;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {

// Entry (2,3) of A0 * A1^q from dense arithmetic.
double dense_coupling(double lambda, RationalAngle angle, double a, double b, double r, double phi) {
    const auto g = oracle::generators(lambda, angle.radians(), a, b, r * std::cos(phi), r * std::sin(phi));
    return oracle::mul(g.a0, oracle::power(g.a1, static_cast<int>(angle.q())))[5];
}

}  // namespace

TEST_CASE("rotation power sums: worked examples") {
    const RotationSum one = rotation_power_sum(pi, 0.0, 1);
    CHECK(one.direct.x == Approx(1.0));
    CHECK(std::abs(one.direct.y) < 1e-15);

    const RotationSum two = rotation_power_sum(pi / 3, pi / 6, 3);
    CHECK(std::abs(two.direct.x) < 1e-14);
    CHECK(two.direct.y == Approx(2.0).epsilon(1e-14));
    REQUIRE(two.closed_form);  // 3 * pi/3 is an odd multiple of pi
    CHECK(std::abs(two.closed_form->x - two.direct.x) < 1e-12);
    CHECK(std::abs(two.closed_form->y - two.direct.y) < 1e-12);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> phi(-pi, pi);
    for (int i = 0; i < 50; ++i) {
        const RotationSum z = rotation_power_sum(2 * pi / 3, phi(rng), 3);
        CHECK(z.direct.norm() < 1e-14);
        CHECK_FALSE(z.closed_form);
    }
}

TEST_CASE("rotation power sums agree with the term-by-term oracle and the closed form") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> phi(-pi, pi);
    for (long q = 1; q <= 15; ++q) {
        for (long p = 1; p < 2 * q; p += 2) {
            if (oracle::gcd(p, q) != 1) continue;
            const double theta = RationalAngle(p, q).radians();
            for (int i = 0; i < 20; ++i) {
                const double f = phi(rng);
                const RotationSum s = rotation_power_sum(theta, f, q);
                const auto ref = oracle::rotation_sum(theta, f, q);
                CHECK(std::abs(s.direct.x - ref[0]) < 1e-12);
                CHECK(std::abs(s.direct.y - ref[1]) < 1e-12);
                REQUIRE(s.closed_form);
                CHECK(std::abs(s.closed_form->x - ref[0]) < 1e-10);
                CHECK(std::abs(s.closed_form->y - ref[1]) < 1e-10);
            }
        }
    }
}

TEST_CASE("Jordan coupling at theta = pi") {
    const auto params = SystemParams::from_polar(0.0, pi, {0.0, 1.0}, 1.0, 0.0);
    const SlopeCertificate c = jordan_coupling(params, RationalAngle(1, 1));
    CHECK(c.q == 1);
    CHECK(c.coupling == Approx(1.0).epsilon(1e-14));
    CHECK(c.slope_lower_bound == Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(c.power_ratio - 1.0) < 0.01);
    // The lower-right block of A0 A1 is the Jordan block [[1, 1], [0, 1]].
    const auto g = oracle::generators(0.0, pi, 0.0, 1.0, 1.0, 0.0);
    const auto w = oracle::mul(g.a0, g.a1);
    CHECK(w[4] == Approx(1.0));
    CHECK(w[5] == Approx(1.0));
    CHECK_THROWS_AS(jordan_coupling(params, RationalAngle(2, 3)), std::invalid_argument);
}

TEST_CASE("coupling equals the dense (2,3) entry") {
    std::mt19937_64 rng(33);
    for (long q = 1; q <= 12; ++q) {
        for (long p = 1; p < 2 * q; p += 2) {
            if (oracle::gcd(p, q) != 1) continue;
            const RationalAngle angle(p, q);
            const SystemParams base = random_params(rng);
            const auto params = SystemParams::from_rational(base.lambda(), angle, base.offset0(),
                                                            base.r(), base.phi());
            const double ref = dense_coupling(base.lambda(), angle, base.offset0().x, base.offset0().y,
                                              base.r(), base.phi());
            const SlopeCertificate c = jordan_coupling(params, angle);
            CHECK(std::abs(c.coupling - ref) < 1e-12);
            CHECK(c.slope_lower_bound == Approx(std::abs(ref) / static_cast<double>(q + 1)));
            if (std::abs(c.coupling) > 1e-3) {
                CHECK(std::abs(c.power_ratio / std::abs(c.coupling) - 1.0) < 0.01);
            }
        }
    }
}

TEST_CASE("degenerate coupling at theta = pi/2 is detected") {
    // Solve entry(2,3) of A0 A1^2 = 0 for b by bisection on the dense product.
    const RationalAngle angle(1, 2);
    auto f = [&](double b) { return dense_coupling(0.0, angle, 0.0, b, 1.0, 0.0); };
    double lo = -10.0, hi = 10.0;
    REQUIRE(f(lo) * f(hi) < 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
    }
    const double b_star = 0.5 * (lo + hi);
    // b sin(theta/2) = r cos(theta/2 - phi) gives b = 1 here.
    CHECK(b_star == Approx(1.0).epsilon(1e-12));

    const auto degenerate = SystemParams::from_rational(0.0, angle, {0.0, b_star}, 1.0, 0.0);
    const Classification c = classify(degenerate, angle);
    CHECK(c.kind == ClassificationKind::DegenerateOddP);
    REQUIRE(std::holds_alternative<SlopeCertificate>(c.certificate));
    CHECK(std::abs(std::get<SlopeCertificate>(c.certificate).coupling) < kDegenerateCouplingTol);

    const auto generic = SystemParams::from_rational(0.0, angle, {0.0, b_star + 0.1}, 1.0, 0.0);
    CHECK(classify(generic, angle).kind == ClassificationKind::MarginallyUnstableLinearOddP);
}

TEST_CASE("kappa at 2pi/3 with lambda = 0") {
    const RationalAngle angle(2, 3);
    const auto params = SystemParams::from_rational(0.0, angle, {0.3, -0.2}, 1.0, 0.4);
    // ||P R^t P|| = |cos(t theta)| for lambda = 0.
    double worst = 0.0;
    for (int t = 1; t < 3; ++t) worst = std::max(worst, std::abs(std::cos(t * angle.radians())));
    const StabilityCertificate s = stability_certificate(params, angle);
    CHECK(std::abs(s.kappa - (1.0 - worst)) <= 1e-10);
    CHECK(std::abs(s.kappa - 0.5) <= 1e-10);
    CHECK(s.c2 == 1.0 + 2.0 * s.c1 * s.c1 / s.kappa);
    CHECK(s.overall_bound == s.c1 * s.c1 * s.c2);
    CHECK(s.c1 >= 1.0);
}

TEST_CASE("stability certificate preconditions") {
    const auto params = SystemParams::from_polar(0.0, 1.0, {}, 1.0, 0.0);
    CHECK_THROWS_AS(stability_certificate(params, RationalAngle(1, 3)), std::invalid_argument);
    CHECK_THROWS_AS(stability_certificate(params, RationalAngle(1, 1)), std::invalid_argument);
}

TEST_CASE("A1^q is the identity and C1 dominates all generator powers") {
    std::mt19937_64 rng(34);
    for (long q = 2; q <= 20; ++q) {
        for (long p = 2; p < 2 * q; p += 2) {
            if (oracle::gcd(p, q) != 1) continue;
            const RationalAngle angle(p, q);
            const SystemParams base = random_params(rng);
            const auto params = SystemParams::from_rational(base.lambda(), angle, base.offset0(),
                                                            base.r(), base.phi());
            const StabilityCertificate s = stability_certificate(params, angle);
            CHECK(s.identity_residual <= 1e-10);
            CHECK(s.kappa > 0.0);
            CHECK(s.kappa <= 1.0);
            const auto g = oracle::generators(params.lambda(), params.theta(), params.offset0().x,
                                              params.offset0().y, params.offset1().x,
                                              params.offset1().y);
            auto m0 = oracle::identity(), m1 = oracle::identity();
            for (int t = 0; t <= 300; ++t) {
                CHECK(oracle::spectral_norm(m0) <= s.c1 + 1e-12);
                CHECK(oracle::spectral_norm(m1) <= s.c1 + 1e-12);
                m0 = oracle::mul(g.a0, m0);
                m1 = oracle::mul(g.a1, m1);
            }
        }
    }
}

TEST_CASE("brute-force alpha stays below the stability bound") {
    std::mt19937_64 rng(35);
    for (const RationalAngle angle : {RationalAngle(2, 3), RationalAngle(4, 5)}) {
        for (int draw = 0; draw < 10; ++draw) {
            const SystemParams base = random_params(rng);
            const auto params = SystemParams::from_rational(base.lambda(), angle, base.offset0(),
                                                            base.r(), base.phi());
            const double bound = stability_certificate(params, angle).overall_bound;
            const auto ext = oracle::enumerate_all(
                oracle::generators(params.lambda(), params.theta(), params.offset0().x,
                                   params.offset0().y, params.offset1().x, params.offset1().y),
                14);
            for (const auto& e : ext) CHECK(e.alpha <= bound);
        }
    }
}

TEST_CASE("word growth coefficient") {
    CHECK(word_growth_coefficient(AffineTriangularMatrix::identity()) == 0.0);
    CHECK(word_growth_coefficient({Mat2::identity(), {-2.5, 0.0}}) == Approx(2.5));
    CHECK(word_growth_coefficient({Mat2::diag(0.5, -1.0), {3.0, 4.0}}) == 0.0);
    CHECK(word_growth_coefficient({Mat2::diag(0.5, 1.0), {3.0, 4.0}}) == Approx(4.0));

    const auto g = build_generators(SystemParams::from_polar(0.0, pi, {0.0, 1.0}, 1.0, 0.0));
    const auto w = compose(g.a0, g.a1);
    CHECK(word_growth_coefficient(w) == Approx(1.0).epsilon(1e-12));
    const auto wm = power(w, 100'000);
    const double ratio = oracle::spectral_norm(wm.dense()) / 1e5;
    CHECK(std::abs(ratio - 1.0) <= 1e-3);

    CHECK_THROWS_AS(word_growth_coefficient({Mat2::diag(1.1, 0.2), {}}), std::invalid_argument);
    CHECK_THROWS_AS(word_growth_coefficient({Mat2::rotation(0.3) * 1.01, {}}), std::invalid_argument);
}

TEST_CASE("word growth coefficient matches power iteration on random words") {
    std::mt19937_64 rng(36);
    for (int i = 0; i < 40; ++i) {
        const SystemParams p = random_params(rng);
        const auto g = build_generators(p);
        std::vector<std::uint8_t> letters;
        for (int k = 0; k < 1 + static_cast<int>(rng() % 6); ++k) letters.push_back(rng() & 1u);
        const auto w = word_product(SwitchingWord(letters), g);
        const double coeff = word_growth_coefficient(w);
        const double ratio = oracle::spectral_norm(power(w, 100'000).dense()) / 1e5;
        CHECK(std::abs(ratio - coeff) <= 1e-3 * std::max(1.0, coeff));
    }
}

TEST_CASE("classify dispatches on parity") {
    const auto params = SystemParams::from_polar(0.0, pi, {0.0, 1.0}, 1.0, 0.0);
    const Classification odd = classify(params, RationalAngle(1, 1));
    CHECK(odd.kind == ClassificationKind::MarginallyUnstableLinearOddP);
    CHECK(std::holds_alternative<SlopeCertificate>(odd.certificate));
    const Classification even = classify(params, RationalAngle(2, 3));
    CHECK(even.kind == ClassificationKind::MarginallyStableEvenP);
    REQUIRE(std::holds_alternative<StabilityCertificate>(even.certificate));
    CHECK(std::get<StabilityCertificate>(even.certificate).kappa > 0.0);
    for (auto kind : {ClassificationKind::MarginallyStableEvenP,
                      ClassificationKind::MarginallyUnstableLinearOddP,
                      ClassificationKind::DegenerateOddP, ClassificationKind::OutOfScopeAngle}) {
        CHECK(classification_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(classification_kind_from_string("Stable"), std::invalid_argument);
}

TEST_CASE("products have norm at least 1 and at most 1 + t u_max") {
    std::mt19937_64 rng(37);
    for (int draw = 0; draw < 5; ++draw) {
        const SystemParams p = random_params(rng);
        const double u_max = std::max(p.offset0().norm(), p.offset1().norm());
        const auto ext = oracle::enumerate_all(
            oracle::generators(p.lambda(), p.theta(), p.offset0().x, p.offset0().y, p.offset1().x,
                               p.offset1().y),
            12);
        for (std::size_t t = 0; t < ext.size(); ++t) {
            CHECK(ext[t].alpha >= 1.0 - 1e-12);
            CHECK(ext[t].alpha <= 1.0 + static_cast<double>(t) * u_max + 1e-12);
        }
        const GrowthSeries s = growth_series(p, 1000);
        for (std::int64_t t = 1; t <= 1000; ++t) {
            CHECK(s.at(t).alpha_lo >= 1.0);
            CHECK(s.at(t).alpha_lo <= 1.0 + static_cast<double>(t) * u_max + 1e-9);
        }
        CHECK(std::pow(s.at(1000).alpha_hi, 1e-3) < 1.01);
    }
}

TEST_CASE("odd-p growth reaches the slope lower bound") {
    for (const RationalAngle angle : {RationalAngle(1, 1), RationalAngle(1, 3), RationalAngle(3, 5)}) {
        const auto params = SystemParams::from_rational(0.2, angle, {0.0, 1.0}, 1.0, 0.0);
        const SlopeCertificate c = jordan_coupling(params, angle);
        REQUIRE(std::abs(c.coupling) > kDegenerateCouplingTol);
        HullEngine e(params);
        while (e.current().t < 10'000) e.step();
        CHECK(e.current().beta / 1e4 >= c.slope_lower_bound - 1e-6);
    }
}
