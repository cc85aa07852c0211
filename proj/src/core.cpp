#include "swgrowth/core.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace swgrowth {

double Mat2::op_norm() const {
    // sigma_max = (|z1| + |z2|) / 2 with z1, z2 the conformal and anticonformal parts;
    // free of the cancellation in the eigenvalue formula for M^T M.
    return 0.5 * (std::hypot(m00 + m11, m10 - m01) + std::hypot(m00 - m11, m10 + m01));
}

RationalAngle::RationalAngle(std::int64_t p, std::int64_t q) {
    if (p < 1 || q < 1) {
        throw std::invalid_argument("RationalAngle: p and q must be positive");
    }
    const std::int64_t g = std::gcd(p, q);
    p_ = p / g;
    q_ = q / g;
    if (p_ >= 2 * q_) {
        throw std::invalid_argument("RationalAngle: p/q must lie in (0, 2)");
    }
}

double RationalAngle::radians() const {
    return std::numbers::pi * static_cast<double>(p_) / static_cast<double>(q_);
}

SystemParams SystemParams::from_polar(double lambda, double theta, Vec2 offset0, double r,
                                      double phi) {
    SystemParams s;
    s.lambda_ = lambda;
    s.theta_ = theta;
    s.offset0_ = offset0;
    s.r_ = r;
    s.phi_ = phi;
    s.offset1_ = {r * std::cos(phi), r * std::sin(phi)};
    s.validate();
    return s;
}

SystemParams SystemParams::from_cartesian(double lambda, double theta, Vec2 offset0,
                                          Vec2 offset1) {
    SystemParams s;
    s.lambda_ = lambda;
    s.theta_ = theta;
    s.offset0_ = offset0;
    s.offset1_ = offset1;
    s.r_ = offset1.norm();
    s.phi_ = s.r_ > 0.0 ? std::atan2(offset1.y, offset1.x) : 0.0;
    s.validate();
    return s;
}

SystemParams SystemParams::from_rational(double lambda, RationalAngle angle, Vec2 offset0,
                                         double r, double phi) {
    return from_polar(lambda, angle.radians(), offset0, r, phi).with_angle(angle);
}

SystemParams SystemParams::with_theta(double theta) const {
    SystemParams s = *this;
    s.theta_ = theta;
    s.angle_.reset();
    s.validate();
    return s;
}

SystemParams SystemParams::with_angle(RationalAngle angle) const {
    SystemParams s = *this;
    s.theta_ = angle.radians();
    s.angle_ = angle;
    return s;
}

SystemParams SystemParams::with_offsets(Vec2 offset0, Vec2 offset1) const {
    SystemParams s = from_cartesian(lambda_, theta_, offset0, offset1);
    s.angle_ = angle_;
    return s;
}

void SystemParams::validate() const {
    if (!(std::abs(lambda_) < 1.0)) {
        throw std::invalid_argument("SystemParams: |lambda| must be < 1");
    }
    if (!(theta_ > 0.0 && theta_ < 2.0 * std::numbers::pi)) {
        throw std::invalid_argument("SystemParams: theta must lie in (0, 2pi)");
    }
    if (!(r_ >= 0.0) || !std::isfinite(r_)) {
        throw std::invalid_argument("SystemParams: r must be >= 0");
    }
    if (!std::isfinite(offset0_.x) || !std::isfinite(offset0_.y) || !std::isfinite(phi_)) {
        throw std::invalid_argument("SystemParams: offsets must be finite");
    }
}

std::array<double, 9> AffineTriangularMatrix::dense() const {
    return {block.m00, block.m01, offset.x, block.m10, block.m11, offset.y, 0.0, 0.0, 1.0};
}

SwitchingWord::SwitchingWord(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {
    for (auto l : letters_) {
        if (l > 1) throw std::invalid_argument("SwitchingWord: letters must be 0 or 1");
    }
}

SwitchingWord SwitchingWord::parse(std::string_view text) {
    std::vector<std::uint8_t> letters;
    letters.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("SwitchingWord: expected only '0' and '1'");
        }
        letters.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return SwitchingWord(std::move(letters));
}

std::string SwitchingWord::str() const {
    std::string s;
    s.reserve(letters_.size());
    for (auto l : letters_) s.push_back(static_cast<char>('0' + l));
    return s;
}

SwitchingWord SwitchingWord::repeat(std::uint8_t letter, std::size_t count) {
    return SwitchingWord(std::vector<std::uint8_t>(count, letter));
}

SwitchingWord SwitchingWord::then(const SwitchingWord& tail) const {
    std::vector<std::uint8_t> out = letters_;
    out.insert(out.end(), tail.letters_.begin(), tail.letters_.end());
    return SwitchingWord(std::move(out));
}

Generators build_generators(const SystemParams& params) {
    Generators g;
    g.a0 = {Mat2::diag(params.lambda(), -1.0), params.offset0()};
    g.a1 = {Mat2::rotation(params.theta()), params.offset1()};
    return g;
}

AffineTriangularMatrix word_product(const SwitchingWord& word, const Generators& gens) {
    AffineTriangularMatrix acc = AffineTriangularMatrix::identity();
    for (auto letter : word.letters()) acc = compose(gens[letter], acc);
    return acc;
}

AffineTriangularMatrix power(const AffineTriangularMatrix& m, std::uint64_t exponent) {
    AffineTriangularMatrix result = AffineTriangularMatrix::identity();
    AffineTriangularMatrix base = m;
    while (exponent > 0) {
        if (exponent & 1U) result = compose(base, result);
        exponent >>= 1U;
        if (exponent > 0) base = compose(base, base);
    }
    return result;
}

double largest_symmetric_eigenvalue(std::array<double, 9> a) {
    auto at = [&a](int i, int j) -> double& { return a[3 * i + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = at(0, 1) * at(0, 1) + at(0, 2) * at(0, 2) + at(1, 2) * at(1, 2);
        const double diag = at(0, 0) * at(0, 0) + at(1, 1) * at(1, 1) + at(2, 2) * at(2, 2);
        if (off <= 1e-36 * diag || off == 0.0) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    return std::max({at(0, 0), at(1, 1), at(2, 2)});
}

double op_norm(const AffineTriangularMatrix& m) {
    const auto d = m.dense();
    std::array<double, 9> gram{};
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += d[3 * k + i] * d[3 * k + j];
            gram[3 * i + j] = s;
            gram[3 * j + i] = s;
        }
    }
    return std::sqrt(std::max(0.0, largest_symmetric_eigenvalue(gram)));
}

}  // namespace swgrowth
