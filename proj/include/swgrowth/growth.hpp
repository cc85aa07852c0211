#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swgrowth/core.hpp"

namespace swgrowth {

/// Extreme points of conv(S_t), the set of offsets reachable in t steps.
///
/// `accumulated_error` bounds the Hausdorff distance between the stored polygon
/// and the exact hull: exact ⊂ stored + ball(accumulated_error), stored ⊂ exact.
struct ReachableHull {
    std::vector<Vec2> vertices;  // counterclockwise
    double accumulated_error = 0.0;

    static ReachableHull origin() { return {{Vec2{}}, 0.0}; }
    double max_norm() const;
};

inline constexpr double kCollinearTol = 1e-12;
inline constexpr double kDuplicateTol = 1e-13;

/// Convex hull (Andrew's monotone chain), counterclockwise, collinear points dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

/// Drops vertices lying within `tol` of the hull of the retained ones.
/// Returns the largest distance of a dropped vertex to the retained polygon
/// (always <= tol).
double prune_hull(std::vector<Vec2>& vertices, double tol);

/// conv((B0 h + u0) ∪ (B1 h + u1)), pruned; error ledger grows by the pruning loss.
ReachableHull hull_step(const ReachableHull& h, const AffineTriangularMatrix& a0,
                        const AffineTriangularMatrix& a1, double prune_tol);

struct GrowthOptions {
    double prune_tol = 1e-10;
    std::size_t vertex_cap = 1'000'000;
};

struct GrowthRecord {
    std::int64_t t = 0;
    double beta = 0.0;   // lower bound for the true beta_t
    double eps = 0.0;    // true beta_t <= beta + eps
    double alpha_lo = 1.0;
    double alpha_hi = 1.0;
};

struct GrowthSeries {
    std::vector<GrowthRecord> records;  // records[t].t == t

    const GrowthRecord& at(std::int64_t t) const { return records.at(static_cast<std::size_t>(t)); }
    std::int64_t horizon() const { return static_cast<std::int64_t>(records.size()) - 1; }
};

GrowthRecord make_record(std::int64_t t, double beta, double eps);

/// Steps the reachable hull forward one time unit at a time.
class HullEngine {
public:
    HullEngine(const SystemParams& params, GrowthOptions options = {});
    HullEngine(const Generators& gens, GrowthOptions options = {});

    /// Throws std::runtime_error if the vertex cap is exceeded.
    const GrowthRecord& step();
    const GrowthRecord& current() const { return record_; }
    const ReachableHull& hull() const { return hull_; }

private:
    Generators gens_;
    GrowthOptions options_;
    ReachableHull hull_ = ReachableHull::origin();
    GrowthRecord record_{};
};

/// Records for t = 0..horizon.
GrowthSeries growth_series(const SystemParams& params, std::int64_t horizon,
                           GrowthOptions options = {});
GrowthSeries growth_series(const Generators& gens, std::int64_t horizon,
                           GrowthOptions options = {});

inline constexpr int kBruteForceMaxLength = 24;

struct BruteForceResult {
    double alpha = 1.0;
    double beta = 0.0;
    SwitchingWord alpha_word;
    SwitchingWord beta_word;
};

/// Exhaustive maximum over all 2^t words; first maximiser in lexicographic order.
/// Throws std::invalid_argument for t outside [0, kBruteForceMaxLength].
BruteForceResult brute_force(const SystemParams& params, int t);
BruteForceResult brute_force(const Generators& gens, int t);

}  // namespace swgrowth
