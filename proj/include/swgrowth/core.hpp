#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swgrowth {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// z-component of (b - a) x (c - a); positive when a, b, c turn counterclockwise.
constexpr double cross(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Row-major 2x2 matrix [[m00, m01], [m10, m11]].
struct Mat2 {
    double m00 = 1.0, m01 = 0.0;
    double m10 = 0.0, m11 = 1.0;

    static constexpr Mat2 identity() { return {}; }
    static constexpr Mat2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }
    static Mat2 rotation(double psi) {
        const double c = std::cos(psi), s = std::sin(psi);
        return {c, -s, s, c};
    }

    constexpr Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    constexpr Vec2 operator*(const Vec2& v) const {
        return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y};
    }
    constexpr Mat2 operator-(const Mat2& o) const {
        return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
    }
    constexpr Mat2 operator*(double s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }
    constexpr bool operator==(const Mat2&) const = default;

    constexpr double det() const { return m00 * m11 - m01 * m10; }
    constexpr double trace() const { return m00 + m11; }

    /// Largest singular value (closed form for 2x2).
    double op_norm() const;
};

/// Exact angle p*pi/q with gcd(p, q) = 1 and 0 < p/q < 2.
class RationalAngle {
public:
    /// Reduces to lowest terms; throws std::invalid_argument outside (0, 2pi).
    RationalAngle(std::int64_t p, std::int64_t q);

    std::int64_t p() const { return p_; }
    std::int64_t q() const { return q_; }
    bool p_is_odd() const { return (p_ % 2) != 0; }
    double radians() const;

    bool operator==(const RationalAngle&) const = default;

private:
    std::int64_t p_;
    std::int64_t q_;
};

/// Parameters (lambda, theta, a, b, r, phi) of the generator pair.
class SystemParams {
public:
    /// Throws std::invalid_argument unless |lambda| < 1, 0 < theta < 2pi and r >= 0.
    static SystemParams from_polar(double lambda, double theta, Vec2 offset0, double r, double phi);
    static SystemParams from_cartesian(double lambda, double theta, Vec2 offset0, Vec2 offset1);
    static SystemParams from_rational(double lambda, RationalAngle angle, Vec2 offset0, double r,
                                      double phi);

    double lambda() const { return lambda_; }
    double theta() const { return theta_; }
    const std::optional<RationalAngle>& angle() const { return angle_; }
    Vec2 offset0() const { return offset0_; }
    Vec2 offset1() const { return offset1_; }
    double r() const { return r_; }
    double phi() const { return phi_; }

    SystemParams with_theta(double theta) const;
    SystemParams with_angle(RationalAngle angle) const;
    SystemParams with_offsets(Vec2 offset0, Vec2 offset1) const;

private:
    SystemParams() = default;
    void validate() const;

    double lambda_ = 0.0;
    double theta_ = 0.0;
    std::optional<RationalAngle> angle_;
    Vec2 offset0_;
    Vec2 offset1_;
    double r_ = 0.0;
    double phi_ = 0.0;
};

/// The 3x3 matrix [[B, u], [0, 1]]; the bottom row is implicit.
struct AffineTriangularMatrix {
    Mat2 block;
    Vec2 offset;

    static constexpr AffineTriangularMatrix identity() { return {}; }

    constexpr Vec2 apply(const Vec2& v) const { return block * v + offset; }
    /// Dense row-major 3x3 form.
    std::array<double, 9> dense() const;
    bool operator==(const AffineTriangularMatrix&) const = default;
};

/// Finite word over {0, 1}; letters()[0] is the earliest time step.
class SwitchingWord {
public:
    SwitchingWord() = default;
    explicit SwitchingWord(std::vector<std::uint8_t> letters);
    /// Parses a string such as "0110".
    static SwitchingWord parse(std::string_view text);

    const std::vector<std::uint8_t>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    std::string str() const;

    static SwitchingWord repeat(std::uint8_t letter, std::size_t count);
    SwitchingWord then(const SwitchingWord& tail) const;

    bool operator==(const SwitchingWord&) const = default;

private:
    std::vector<std::uint8_t> letters_;
};

struct Generators {
    AffineTriangularMatrix a0;
    AffineTriangularMatrix a1;

    const AffineTriangularMatrix& operator[](std::uint8_t letter) const {
        return letter == 0 ? a0 : a1;
    }
};

/// A0 = [[diag(lambda, -1), (a, b)], [0, 1]], A1 = [[R_theta, r v_phi], [0, 1]].
Generators build_generators(const SystemParams& params);

/// Matrix product M * N, i.e. the affine map "N first, then M".
constexpr AffineTriangularMatrix compose(const AffineTriangularMatrix& m,
                                         const AffineTriangularMatrix& n) {
    return {m.block * n.block, m.block * n.offset + m.offset};
}

/// A_{w_t} ... A_{w_1}: the first letter is the rightmost factor.
AffineTriangularMatrix word_product(const SwitchingWord& word, const Generators& gens);

/// M^m by repeated squaring.
AffineTriangularMatrix power(const AffineTriangularMatrix& m, std::uint64_t exponent);

/// Spectral norm of the full 3x3 matrix.
double op_norm(const AffineTriangularMatrix& m);

/// Largest eigenvalue of a symmetric 3x3 matrix (cyclic Jacobi).
double largest_symmetric_eigenvalue(std::array<double, 9> sym);

}  // namespace swgrowth
