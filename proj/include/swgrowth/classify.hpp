#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "swgrowth/core.hpp"

namespace swgrowth {

struct RotationSum {
    /// (sum cos(k theta + phi), sum sin(k theta + phi)) over k = 0..q-1, summed term by term.
    Vec2 direct;
    /// (sin(theta/2 - phi), cos(theta/2 - phi)) / sin(theta/2); present only when
    /// q*theta is an odd multiple of pi.
    std::optional<Vec2> closed_form;
};

RotationSum rotation_power_sum(double theta, double phi, std::int64_t q);

/// Linear-growth certificate for odd p.
///
/// The coupling is the (2,3) entry of A0 * A1^q. Carrying the algebra through
/// gives coupling = b - r cos(theta/2 - phi) / sin(theta/2), so the system is
/// degenerate exactly when b sin(theta/2) = r cos(theta/2 - phi). The library
/// never evaluates that expression; it multiplies the matrices.
struct SlopeCertificate {
    std::int64_t q = 1;
    double coupling = 0.0;
    double slope_lower_bound = 0.0;  // |coupling| / (q + 1)
    double power_ratio = 0.0;        // ||(A0 A1^q)^m|| / m at m = power_check_exponent
    std::uint64_t power_check_exponent = 10'000;
};

/// Marginal-stability certificate for even p, q > 1.
struct StabilityCertificate {
    double kappa = 0.0;  // 1 - max_{1<=t<q} ||P R^t P||
    double c1 = 1.0;     // sup_t max(||A0^t||, ||A1^t||)
    double c2 = 1.0;     // 1 + 2 c1^2 / kappa
    double overall_bound = 1.0;  // c1^2 * c2, bounds every product norm
    double identity_residual = 0.0;  // max entry of |A1^q - I|
};

enum class ClassificationKind {
    MarginallyStableEvenP,
    MarginallyUnstableLinearOddP,
    DegenerateOddP,
    OutOfScopeAngle,
};

std::string_view to_string(ClassificationKind kind);
/// Throws std::invalid_argument on unknown names.
ClassificationKind classification_kind_from_string(std::string_view name);

struct Classification {
    ClassificationKind kind = ClassificationKind::OutOfScopeAngle;
    std::variant<std::monostate, StabilityCertificate, SlopeCertificate> certificate;
};

inline constexpr double kDegenerateCouplingTol = 1e-10;

/// Requires odd p. Classification of the result is Degenerate when
/// |coupling| < kDegenerateCouplingTol.
SlopeCertificate jordan_coupling(const SystemParams& params, RationalAngle angle);

/// Requires even p and q > 1; throws std::invalid_argument otherwise and
/// std::logic_error if the computed kappa is not positive.
StabilityCertificate stability_certificate(const SystemParams& params, RationalAngle angle);

/// lim_m ||W^m|| / m for a block of norm <= 1: the norm of the offset projected
/// onto the eigenvalue-1 eigenspace of the block. Throws std::invalid_argument
/// when the block has spectral radius > 1 + 1e-9.
double word_growth_coefficient(const AffineTriangularMatrix& w);

/// Parity dispatch. `params` supplies lambda and the offsets; theta is taken from `angle`.
Classification classify(const SystemParams& params, RationalAngle angle);

}  // namespace swgrowth
