#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swgrowth/core.hpp"
#include "swgrowth/expr.hpp"
#include "swgrowth/growth.hpp"

namespace swgrowth {

/// Nested-interval realisation of the generic irregular-growth construction.
///
/// A stabilising stage of rank r certifies, on a theta-interval around an even-p
/// anchor, that max_{j,k} beta_t(theta; e_j, e_k) / a(t) < 1/r for one time t.
/// A destabilising stage certifies beta_s(theta; w, w') / b(s) > r around an
/// odd-p anchor with nonzero Jordan coupling. Alternating the two for
/// r = 1, 2, ... yields strictly nested intervals; every theta in the final
/// interval satisfies all certified inequalities at once.
///
/// Each stage interval is split into `cells` equal cells. On a cell of width h
/// with centre c, beta_t is Lipschitz with constant L, bounded by the smaller of
/// t (1 + t u_max)^2 and a Gronwall bound built from beta_k(c), k < t (the theta
/// derivative of a length-t offset sum is at most sum_k beta_k). A cell is
/// certified when L * h < margin, the slack of the inequality at c.

struct GrowthTarget {
    SequenceExpr a;  // unbounded; slow times
    SequenceExpr b;  // unbounded, o(t); fast times
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo < x && x < hi; }
    /// Closed self inside the open `outer`.
    bool strictly_inside(const Interval& outer) const { return outer.lo < lo && hi < outer.hi; }
    bool operator==(const Interval&) const = default;
};

enum class StageKind { Stabilizing, Destabilizing };

std::string_view to_string(StageKind kind);
StageKind stage_kind_from_string(std::string_view name);

struct StageCertificate {
    StageKind kind = StageKind::Stabilizing;
    int rank = 1;
    RationalAngle anchor{1, 1};
    std::int64_t time = 0;
    Interval interval;
    double margin = 0.0;     // smallest slack over cell centres, in units of beta
    double lipschitz = 0.0;  // largest per-cell Lipschitz bound
    int cells = 1;

    double cell_width() const { return interval.width() / cells; }
};

struct BaireConfig {
    double lambda = 0.0;
    Vec2 w{0.0, 1.0};
    Vec2 w_prime{1.0, 0.0};
    /// The chosen time leaves this factor of headroom in the inequality.
    double margin_factor = 2.0;
    std::int64_t q_max = 10'000;
    std::int64_t time_guard = 10'000'000;
    /// Even-p anchors tried per stabilising stage before giving up.
    int anchor_attempts = 8;
    /// Cells added on each side of the anchor cell, at most.
    int max_extension_cells = 24;
    /// Extension stops once cells * time would exceed this many hull steps.
    std::int64_t extension_work = 40'000'000;
    /// Fresh evaluations up to this time use prune_tol = 0.
    std::int64_t exact_time_limit = 4096;
    GrowthOptions growth{};
    int jobs = 1;
};

struct CertificateChain {
    Interval initial;
    std::vector<StageCertificate> stages;
    Interval final_interval;
};

/// Raised when a stage cannot be certified; carries the stages built so far.
class ConstructionError : public std::runtime_error {
public:
    ConstructionError(const std::string& what, CertificateChain partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const CertificateChain& partial() const { return partial_; }

private:
    CertificateChain partial_;
};

/// t (1 + t u_max)^2.
double lipschitz_bound(std::int64_t t, double u_max);

/// Gronwall-type Lipschitz bound on a cell of width h from the per-step upper
/// values upper[k] >= beta_k at the cell centre (upper.size() >= t).
double gronwall_lipschitz(std::span<const double> upper, std::int64_t t, double h);

/// Even- or odd-p anchors strictly inside the interval, ordered by q then p.
std::vector<RationalAngle> rational_anchors(const Interval& interval, bool odd_p,
                                            std::int64_t q_max, std::size_t limit);

/// Offset pairs (e_j, e_k) used by stabilising stages.
std::vector<std::pair<Vec2, Vec2>> basis_offset_pairs();

StageCertificate find_stabilizing_stage(const Interval& interval, int rank,
                                        const GrowthTarget& target, const BaireConfig& config);

StageCertificate find_destabilizing_stage(const Interval& interval, int rank,
                                          const GrowthTarget& target, const BaireConfig& config);

/// Stages S1, D1, S2, D2, ... up to rank `depth`. Throws ConstructionError.
CertificateChain construct(const Interval& initial, int depth, const GrowthTarget& target,
                           const BaireConfig& config);

struct VerifyReport {
    bool ok = true;
    int failing_stage = -1;
    std::string message;
};

struct VerifyOptions {
    /// Also recompute every covering cell (not only endpoints and midpoint).
    bool recheck_cells = true;
};

/// Recomputes every stage from scratch. Never throws on a bad chain.
VerifyReport verify(const CertificateChain& chain, const GrowthTarget& target,
                    const BaireConfig& config, VerifyOptions options = {});

/// Value of the stage's functional at theta: max over basis pairs of beta + eps
/// (stabilising) or beta (destabilising), from a fresh computation.
double stage_functional(const StageCertificate& stage, double theta, const BaireConfig& config);

}  // namespace swgrowth
