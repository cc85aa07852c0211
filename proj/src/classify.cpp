#include "swgrowth/classify.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swgrowth {

RotationSum rotation_power_sum(double theta, double phi, std::int64_t q) {
    if (q < 1) throw std::invalid_argument("rotation_power_sum: q must be >= 1");
    RotationSum out;
    for (std::int64_t k = 0; k < q; ++k) {
        const double arg = static_cast<double>(k) * theta + phi;
        out.direct.x += std::cos(arg);
        out.direct.y += std::sin(arg);
    }
    const double turns = static_cast<double>(q) * theta / std::numbers::pi;
    const double nearest = std::round(turns);
    const bool odd_multiple = std::abs(turns - nearest) < 1e-9 &&
                              std::fmod(std::abs(nearest), 2.0) == 1.0;
    const double half_sin = std::sin(0.5 * theta);
    if (odd_multiple && std::abs(half_sin) > 1e-12) {
        out.closed_form = Vec2{std::sin(0.5 * theta - phi) / half_sin,
                               std::cos(0.5 * theta - phi) / half_sin};
    }
    return out;
}

std::string_view to_string(ClassificationKind kind) {
    switch (kind) {
        case ClassificationKind::MarginallyStableEvenP: return "MarginallyStableEvenP";
        case ClassificationKind::MarginallyUnstableLinearOddP: return "MarginallyUnstableLinearOddP";
        case ClassificationKind::DegenerateOddP: return "DegenerateOddP";
        case ClassificationKind::OutOfScopeAngle: return "OutOfScopeAngle";
    }
    return "OutOfScopeAngle";
}

ClassificationKind classification_kind_from_string(std::string_view name) {
    for (auto k : {ClassificationKind::MarginallyStableEvenP,
                   ClassificationKind::MarginallyUnstableLinearOddP,
                   ClassificationKind::DegenerateOddP, ClassificationKind::OutOfScopeAngle}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown classification kind: " + std::string(name));
}

namespace {

AffineTriangularMatrix repeated(const AffineTriangularMatrix& m, std::int64_t count) {
    AffineTriangularMatrix acc = AffineTriangularMatrix::identity();
    for (std::int64_t i = 0; i < count; ++i) acc = compose(m, acc);
    return acc;
}

double sup_power_norm_a0(const Generators& gens, double lambda) {
    // A0^t -> alternates between two limits; the lambda-component decays geometrically.
    const double a = gens.a0.offset.x;
    const double b = gens.a0.offset.y;
    double best = 1.0;
    AffineTriangularMatrix m = AffineTriangularMatrix::identity();
    double decay = 1.0;
    std::int64_t t = 0;
    while (decay >= 1e-14 || t < 2) {
        best = std::max(best, op_norm(m));
        m = compose(gens.a0, m);
        decay *= std::abs(lambda);
        ++t;
    }
    best = std::max(best, op_norm(m));
    decay *= std::abs(lambda);
    const double fixed_x = a / (1.0 - lambda);
    const AffineTriangularMatrix even_limit{Mat2::diag(0.0, 1.0), {fixed_x, 0.0}};
    const AffineTriangularMatrix odd_limit{Mat2::diag(0.0, -1.0), {fixed_x, b}};
    const double tail = decay * (1.0 + std::abs(a) / (1.0 - lambda));
    return std::max(best, std::max(op_norm(even_limit), op_norm(odd_limit)) + tail);
}

}  // namespace

SlopeCertificate jordan_coupling(const SystemParams& params, RationalAngle angle) {
    if (!angle.p_is_odd()) throw std::invalid_argument("jordan_coupling: p must be odd");
    const Generators gens = build_generators(params.with_angle(angle));
    const AffineTriangularMatrix w = compose(gens.a0, repeated(gens.a1, angle.q()));
    SlopeCertificate cert;
    cert.q = angle.q();
    cert.coupling = w.offset.y;
    cert.slope_lower_bound = std::abs(cert.coupling) / static_cast<double>(angle.q() + 1);
    cert.power_ratio = op_norm(power(w, cert.power_check_exponent)) /
                       static_cast<double>(cert.power_check_exponent);
    return cert;
}

StabilityCertificate stability_certificate(const SystemParams& params, RationalAngle angle) {
    if (angle.p_is_odd() || angle.q() <= 1) {
        throw std::invalid_argument("stability_certificate: needs even p and q > 1");
    }
    const SystemParams sp = params.with_angle(angle);
    const Generators gens = build_generators(sp);
    StabilityCertificate cert;

    const AffineTriangularMatrix a1q = repeated(gens.a1, angle.q());
    const auto dense = a1q.dense();
    const auto eye = AffineTriangularMatrix::identity().dense();
    for (std::size_t i = 0; i < dense.size(); ++i) {
        cert.identity_residual = std::max(cert.identity_residual, std::abs(dense[i] - eye[i]));
    }
    if (cert.identity_residual > 1e-10) {
        throw std::logic_error("stability_certificate: A1^q differs from the identity by " +
                               std::to_string(cert.identity_residual));
    }

    const Mat2 p = gens.a0.block;
    Mat2 rot = Mat2::identity();
    double worst = 0.0;
    for (std::int64_t t = 1; t < angle.q(); ++t) {
        rot = gens.a1.block * rot;
        worst = std::max(worst, (p * rot * p).op_norm());
    }
    cert.kappa = 1.0 - worst;
    if (cert.kappa <= 1e-12) {
        throw std::logic_error("stability_certificate: kappa is not positive");
    }

    double c1 = sup_power_norm_a0(gens, sp.lambda());
    AffineTriangularMatrix m = AffineTriangularMatrix::identity();
    for (std::int64_t t = 0; t <= 2 * angle.q(); ++t) {
        c1 = std::max(c1, op_norm(m));
        m = compose(gens.a1, m);
    }
    cert.c1 = c1;
    cert.c2 = 1.0 + 2.0 * c1 * c1 / cert.kappa;
    cert.overall_bound = c1 * c1 * cert.c2;
    return cert;
}

double word_growth_coefficient(const AffineTriangularMatrix& w) {
    const Mat2& b = w.block;
    const double half_tr = 0.5 * b.trace();
    const double disc = half_tr * half_tr - b.det();
    constexpr double kRadiusTol = 1e-9;
    if (disc < -1e-12) {
        if (std::sqrt(b.det()) > 1.0 + kRadiusTol) {
            throw std::invalid_argument("word_growth_coefficient: spectral radius exceeds 1");
        }
        return 0.0;
    }
    const double s = std::sqrt(std::max(disc, 0.0));
    const double mu1 = half_tr + s;
    const double mu2 = half_tr - s;
    if (std::max(std::abs(mu1), std::abs(mu2)) > 1.0 + kRadiusTol) {
        throw std::invalid_argument("word_growth_coefficient: spectral radius exceeds 1");
    }
    const bool one1 = std::abs(mu1 - 1.0) <= kRadiusTol;
    const bool one2 = std::abs(mu2 - 1.0) <= kRadiusTol;
    if (one1 && one2) return w.offset.norm();
    if (!one1 && !one2) return 0.0;
    const double other = one1 ? mu2 : mu1;
    const Mat2 projection = (b - Mat2::identity() * other) * (1.0 / (1.0 - other));
    return (projection * w.offset).norm();
}

Classification classify(const SystemParams& params, RationalAngle angle) {
    Classification out;
    if (angle.p_is_odd()) {
        const SlopeCertificate cert = jordan_coupling(params, angle);
        out.kind = std::abs(cert.coupling) < kDegenerateCouplingTol
                       ? ClassificationKind::DegenerateOddP
                       : ClassificationKind::MarginallyUnstableLinearOddP;
        out.certificate = cert;
    } else if (angle.q() > 1) {
        out.kind = ClassificationKind::MarginallyStableEvenP;
        out.certificate = stability_certificate(params, angle);
    } else {
        out.kind = ClassificationKind::OutOfScopeAngle;
    }
    return out;
}

}  // namespace swgrowth
