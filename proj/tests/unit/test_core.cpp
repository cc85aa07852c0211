#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "swgrowth/core.hpp"
#include "swgrowth/sampling.hpp"

using namespace swgrowth;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {

oracle::Dense to_dense(const AffineTriangularMatrix& m) {
    return {m.block.m00, m.block.m01, m.offset.x, m.block.m10, m.block.m11, m.offset.y, 0, 0, 1};
}

double max_abs_diff(const oracle::Dense& a, const oracle::Dense& b) {
    double d = 0.0;
    for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

AffineTriangularMatrix random_matrix(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {{u(rng), u(rng), u(rng), u(rng)}, {u(rng), u(rng)}};
}

oracle::DenseGens dense_gens(const SystemParams& p) {
    return oracle::generators(p.lambda(), p.theta(), p.offset0().x, p.offset0().y,
                              p.offset1().x, p.offset1().y);
}

}  // namespace

TEST_CASE("generators at theta = pi with a unit A1 offset") {
    const auto g = build_generators(SystemParams::from_polar(0.0, pi, {0.0, 0.0}, 1.0, 0.0));
    CHECK(g.a0.block.m00 == 0.0);
    CHECK(g.a0.block.m11 == -1.0);
    CHECK(g.a0.offset == Vec2{0.0, 0.0});
    CHECK(g.a1.block.m00 == Approx(-1.0).epsilon(1e-15));
    CHECK(g.a1.block.m11 == Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(g.a1.block.m01) < 1e-15);
    CHECK(std::abs(g.a1.block.m10) < 1e-15);
    CHECK(g.a1.offset.x == 1.0);
    CHECK(g.a1.offset.y == 0.0);
}

TEST_CASE("rotation block at 2pi/3") {
    const auto g = build_generators(SystemParams::from_polar(0.5, 2 * pi / 3, {1.0, 2.0}, 1.0, 0.3));
    CHECK(g.a1.block.m00 == Approx(-0.5).epsilon(1e-14));
    CHECK(g.a1.block.m01 == Approx(-std::sqrt(3.0) / 2).epsilon(1e-14));
    CHECK(g.a1.block.m10 == Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
    CHECK(g.a1.block.m11 == Approx(-0.5).epsilon(1e-14));
    CHECK(g.a0.block == Mat2::diag(0.5, -1.0));
}

TEST_CASE("generator blocks have operator norm 1") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto g = build_generators(random_params(rng));
        CHECK(std::abs(g.a0.block.op_norm() - 1.0) <= 1e-12);
        CHECK(std::abs(g.a1.block.op_norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SystemParams::from_polar(1.0, 1.0, {}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemParams::from_polar(-1.0, 1.0, {}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemParams::from_polar(0.0, 0.0, {}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemParams::from_polar(0.0, 2 * pi, {}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemParams::from_polar(0.0, 1.0, {}, -0.1, 0.0), std::invalid_argument);
    CHECK_NOTHROW(SystemParams::from_polar(0.99, 6.28, {}, 0.0, 0.0));
}

TEST_CASE("polar and Cartesian offsets agree") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = random_params(rng);
        CHECK(std::abs(p.offset1().x - p.r() * std::cos(p.phi())) <= 1e-12);
        CHECK(std::abs(p.offset1().y - p.r() * std::sin(p.phi())) <= 1e-12);
        const SystemParams c =
            SystemParams::from_cartesian(p.lambda(), p.theta(), p.offset0(), p.offset1());
        CHECK(std::abs(c.r() - p.r()) <= 1e-12);
        CHECK(std::abs(c.offset1().x - c.r() * std::cos(c.phi())) <= 1e-12);
        CHECK(std::abs(c.offset1().y - c.r() * std::sin(c.phi())) <= 1e-12);
    }
}

TEST_CASE("rational angles are reduced and validated") {
    const RationalAngle a(4, 6);
    CHECK(a.p() == 2);
    CHECK(a.q() == 3);
    CHECK_FALSE(a.p_is_odd());
    CHECK(RationalAngle(3, 9) == RationalAngle(1, 3));
    CHECK(RationalAngle(1, 3).p_is_odd());
    CHECK(RationalAngle(1, 1).radians() == Approx(pi));
    CHECK_THROWS_AS(RationalAngle(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RationalAngle(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(RationalAngle(4, 2), std::invalid_argument);
    CHECK_THROWS_AS(RationalAngle(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(RationalAngle(-1, 3), std::invalid_argument);
    const auto p = SystemParams::from_rational(0.0, RationalAngle(6, 9), {}, 1.0, 0.0);
    REQUIRE(p.angle());
    CHECK(*p.angle() == RationalAngle(2, 3));
    CHECK(p.theta() == Approx(2 * pi / 3));
}

TEST_CASE("compose: identity and translations") {
    std::mt19937_64 rng(1);
    const auto n = random_matrix(rng, 3.0);
    CHECK(compose(AffineTriangularMatrix::identity(), n) == n);
    CHECK(compose(n, AffineTriangularMatrix::identity()) == n);
    const AffineTriangularMatrix u{Mat2::identity(), {1.5, -2.0}};
    const AffineTriangularMatrix v{Mat2::identity(), {0.25, 4.0}};
    const auto uv = compose(u, v);
    CHECK(uv.block == Mat2::identity());
    CHECK(uv.offset == Vec2{1.75, 2.0});
    static_assert(compose(AffineTriangularMatrix::identity(), AffineTriangularMatrix::identity()) ==
                  AffineTriangularMatrix::identity());
}

TEST_CASE("compose matches the dense product and is associative") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
        const auto a = random_matrix(rng, 10.0), b = random_matrix(rng, 10.0),
                   c = random_matrix(rng, 10.0);
        CHECK(max_abs_diff(to_dense(compose(a, b)), oracle::mul(to_dense(a), to_dense(b))) <= 1e-12);
        const auto left = to_dense(compose(compose(a, b), c));
        const auto right = to_dense(compose(a, compose(b, c)));
        double scale = 1.0;
        for (double x : left) scale = std::max(scale, std::abs(x));
        CHECK(max_abs_diff(left, right) <= 1e-12 * scale);
    }
}

TEST_CASE("word products: ordering convention") {
    const auto params = SystemParams::from_polar(0.3, 1.1, {0.5, -0.2}, 0.8, 0.4);
    const auto g = build_generators(params);
    CHECK(word_product(SwitchingWord{}, g) == AffineTriangularMatrix::identity());
    CHECK(word_product(SwitchingWord::parse("0"), g) == g.a0);
    CHECK(word_product(SwitchingWord::parse("1"), g) == g.a1);
    // The first letter acts first: (0,1) is A1 * A0.
    CHECK(word_product(SwitchingWord::parse("01"), g) == compose(g.a1, g.a0));
    CHECK_FALSE(word_product(SwitchingWord::parse("01"), g) == compose(g.a0, g.a1));
}

TEST_CASE("word (1,0,1) at theta = pi equals the dense product") {
    const auto params = SystemParams::from_polar(0.0, pi, {0.0, 0.0}, 1.0, 0.0);
    const auto lib = to_dense(word_product(SwitchingWord::parse("101"), build_generators(params)));
    const auto ref = oracle::word({1, 0, 1}, dense_gens(params));
    CHECK(max_abs_diff(lib, ref) <= 1e-14);
}

TEST_CASE("random words agree with dense products") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = random_params(rng);
        std::vector<int> letters(std::uniform_int_distribution<int>(0, 30)(rng));
        std::vector<std::uint8_t> bytes;
        for (auto& l : letters) {
            l = static_cast<int>(rng() & 1u);
            bytes.push_back(static_cast<std::uint8_t>(l));
        }
        const auto lib = to_dense(word_product(SwitchingWord(bytes), build_generators(p)));
        CHECK(max_abs_diff(lib, oracle::word(letters, dense_gens(p))) <= 1e-12);
    }
}

TEST_CASE("power agrees with repeated composition") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const auto g = build_generators(random_params(rng));
        const auto w = compose(g.a0, g.a1);
        for (int n : {0, 1, 2, 7, 64, 100}) {
            const auto ref = oracle::power(to_dense(w), n);
            double scale = 1.0;
            for (double x : ref) scale = std::max(scale, std::abs(x));
            CHECK(max_abs_diff(to_dense(power(w, static_cast<std::uint64_t>(n))), ref) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("op_norm examples") {
    CHECK(op_norm(AffineTriangularMatrix::identity()) == Approx(1.0).epsilon(1e-14));
    const double n = op_norm({Mat2::identity(), {3.0, 4.0}});
    CHECK(n >= 5.0);
    CHECK(n <= 6.0);
}

TEST_CASE("op_norm matches the closed-form oracle") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const auto m = random_matrix(rng, 5.0);
        const double ref = oracle::spectral_norm(to_dense(m));
        CHECK(std::abs(op_norm(m) - ref) <= 1e-12 * std::max(1.0, ref));
    }
}

TEST_CASE("op_norm is within 1 of the offset norm for contractive blocks") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 500; ++i) {
        const auto g = build_generators(random_params(rng));
        const auto m = compose(compose(g.a0, g.a1), compose(g.a1, g.a0));
        const AffineTriangularMatrix shifted{m.block, m.offset + Vec2{u(rng), u(rng)}};
        CHECK(std::abs(op_norm(shifted) - shifted.offset.norm()) <= 1.0 + 1e-12);
    }
}

TEST_CASE("op_norm is submultiplicative") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const auto a = random_matrix(rng, 4.0), b = random_matrix(rng, 4.0);
        CHECK(op_norm(compose(a, b)) <= op_norm(a) * op_norm(b) + 1e-9);
    }
}

TEST_CASE("generator words: contractive blocks and linear offset bound") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = random_params(rng);
        const auto g = build_generators(p);
        const double u_max = std::max(p.offset0().norm(), p.offset1().norm());
        std::vector<std::uint8_t> letters;
        AffineTriangularMatrix m = AffineTriangularMatrix::identity();
        for (int t = 1; t <= 60; ++t) {
            const auto l = static_cast<std::uint8_t>(rng() & 1u);
            letters.push_back(l);
            m = compose(g[l], m);
            CHECK(m.block.op_norm() <= 1.0 + 1e-12);
            CHECK(m.offset.norm() <= t * u_max + 1e-12);
        }
        CHECK(word_product(SwitchingWord(letters), g) == m);
    }
}

TEST_CASE("switching words: parse, print, concatenate") {
    const auto w = SwitchingWord::parse("0110");
    CHECK(w.length() == 4);
    CHECK(w.str() == "0110");
    CHECK(SwitchingWord::parse("").empty());
    CHECK(SwitchingWord::repeat(1, 3).then(SwitchingWord::parse("0")).str() == "1110");
    CHECK_THROWS_AS(SwitchingWord::parse("012"), std::invalid_argument);
    CHECK_THROWS_AS(SwitchingWord(std::vector<std::uint8_t>{2}), std::invalid_argument);
}

TEST_CASE("dense view of an affine matrix") {
    const AffineTriangularMatrix m{{1, 2, 3, 4}, {5, 6}};
    const auto d = m.dense();
    CHECK(d == std::array<double, 9>{1, 2, 5, 3, 4, 6, 0, 0, 1});
}
