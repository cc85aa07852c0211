#include "swgrowth/growth.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace swgrowth {

namespace {

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 == 0.0) return (p - a).norm();
    const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * s)).norm();
}

// Longest run of consecutive vertices a single chord may replace.
constexpr std::size_t kMaxPruneRun = 64;

}  // namespace

double ReachableHull::max_norm() const {
    double m = 0.0;
    for (const auto& v : vertices) m = std::max(m, v.norm());
    return m;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> points) {
    std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    std::vector<Vec2> unique;
    unique.reserve(points.size());
    for (const auto& p : points) {
        if (!unique.empty() && std::abs(p.x - unique.back().x) <= kDuplicateTol &&
            std::abs(p.y - unique.back().y) <= kDuplicateTol) {
            continue;
        }
        unique.push_back(p);
    }
    if (unique.size() <= 2) return unique;

    std::vector<Vec2> hull(2 * unique.size());
    std::size_t k = 0;
    for (const auto& p : unique) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= kCollinearTol) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = unique.rbegin() + 1; it != unique.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= kCollinearTol) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    if (hull.size() < 2) {
        // Every point collinear within tolerance: keep the two extremes.
        return {unique.front(), unique.back()};
    }
    return hull;
}

double prune_hull(std::vector<Vec2>& vertices, double tol) {
    const std::size_t n = vertices.size();
    if (tol <= 0.0 || n <= 3) return 0.0;

    std::size_t start = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double nv = vertices[i].norm();
        if (nv > best) {
            best = nv;
            start = i;
        }
    }
    std::rotate(vertices.begin(), vertices.begin() + static_cast<std::ptrdiff_t>(start),
                vertices.end());

    std::vector<Vec2> kept{vertices[0]};
    std::vector<Vec2> run;
    double loss = 0.0;
    auto close_run = [&](const Vec2& next) {
        for (const auto& p : run) loss = std::max(loss, distance_to_segment(p, kept.back(), next));
        run.clear();
    };
    for (std::size_t i = 1; i < n; ++i) {
        const Vec2& v = vertices[i];
        const Vec2& next = vertices[(i + 1) % n];
        bool removable = run.size() < kMaxPruneRun &&
                         distance_to_segment(v, kept.back(), next) < tol;
        for (std::size_t j = 0; removable && j < run.size(); ++j) {
            removable = distance_to_segment(run[j], kept.back(), next) < tol;
        }
        if (removable) {
            run.push_back(v);
        } else {
            close_run(v);
            kept.push_back(v);
        }
    }
    close_run(vertices[0]);
    if (kept.size() < 3) return 0.0;
    vertices = std::move(kept);
    return loss;
}

ReachableHull hull_step(const ReachableHull& h, const AffineTriangularMatrix& a0,
                        const AffineTriangularMatrix& a1, double prune_tol) {
    std::vector<Vec2> images;
    images.reserve(2 * h.vertices.size());
    for (const auto& v : h.vertices) images.push_back(a0.apply(v));
    for (const auto& v : h.vertices) images.push_back(a1.apply(v));
    ReachableHull out;
    out.vertices = convex_hull(std::move(images));
    out.accumulated_error = h.accumulated_error + prune_hull(out.vertices, prune_tol);
    return out;
}

GrowthRecord make_record(std::int64_t t, double beta, double eps) {
    return {t, beta, eps, std::max(1.0, beta), beta + eps + 1.0};
}

HullEngine::HullEngine(const SystemParams& params, GrowthOptions options)
    : HullEngine(build_generators(params), options) {}

HullEngine::HullEngine(const Generators& gens, GrowthOptions options)
    : gens_(gens), options_(options) {
    if (options_.prune_tol < 0.0) throw std::invalid_argument("prune_tol must be >= 0");
    record_ = make_record(0, 0.0, 0.0);
}

const GrowthRecord& HullEngine::step() {
    hull_ = hull_step(hull_, gens_.a0, gens_.a1, options_.prune_tol);
    if (hull_.vertices.size() > options_.vertex_cap) {
        throw std::runtime_error("reachable hull exceeded vertex cap (" +
                                 std::to_string(hull_.vertices.size()) + " > " +
                                 std::to_string(options_.vertex_cap) + ") at t = " +
                                 std::to_string(record_.t + 1) +
                                 "; raise the cap or the pruning tolerance");
    }
    record_ = make_record(record_.t + 1, hull_.max_norm(), hull_.accumulated_error);
    return record_;
}

GrowthSeries growth_series(const Generators& gens, std::int64_t horizon, GrowthOptions options) {
    if (horizon < 0) throw std::invalid_argument("growth_series: horizon must be >= 0");
    GrowthSeries series;
    series.records.reserve(static_cast<std::size_t>(horizon) + 1);
    HullEngine engine(gens, options);
    series.records.push_back(engine.current());
    for (std::int64_t t = 1; t <= horizon; ++t) series.records.push_back(engine.step());
    return series;
}

GrowthSeries growth_series(const SystemParams& params, std::int64_t horizon,
                           GrowthOptions options) {
    return growth_series(build_generators(params), horizon, options);
}

namespace {

struct BruteSearch {
    const Generators& gens;
    int length;
    std::vector<std::uint8_t> word;
    BruteForceResult best;
    bool first = true;

    void visit(const AffineTriangularMatrix& prod, int depth) {
        if (depth == length) {
            const double a = op_norm(prod);
            const double b = prod.offset.norm();
            if (first || a > best.alpha) {
                best.alpha = a;
                best.alpha_word = SwitchingWord(word);
            }
            if (first || b > best.beta) {
                best.beta = b;
                best.beta_word = SwitchingWord(word);
            }
            first = false;
            return;
        }
        for (std::uint8_t letter = 0; letter < 2; ++letter) {
            word.push_back(letter);
            visit(compose(gens[letter], prod), depth + 1);
            word.pop_back();
        }
    }
};

}  // namespace

BruteForceResult brute_force(const Generators& gens, int t) {
    if (t < 0 || t > kBruteForceMaxLength) {
        throw std::invalid_argument("brute_force: t must lie in [0, " +
                                    std::to_string(kBruteForceMaxLength) + "], got " +
                                    std::to_string(t));
    }
    BruteSearch search{gens, t, {}, {}, true};
    search.word.reserve(static_cast<std::size_t>(t));
    search.visit(AffineTriangularMatrix::identity(), 0);
    return search.best;
}

BruteForceResult brute_force(const SystemParams& params, int t) {
    return brute_force(build_generators(params), t);
}

}  // namespace swgrowth
