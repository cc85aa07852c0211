#include "swgrowth/baire.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "swgrowth/classify.hpp"
#include "swgrowth/parallel.hpp"

namespace swgrowth {

std::string_view to_string(StageKind kind) {
    return kind == StageKind::Stabilizing ? "Stabilizing" : "Destabilizing";
}

StageKind stage_kind_from_string(std::string_view name) {
    if (name == "Stabilizing") return StageKind::Stabilizing;
    if (name == "Destabilizing") return StageKind::Destabilizing;
    throw std::invalid_argument("unknown stage kind: " + std::string(name));
}

double lipschitz_bound(std::int64_t t, double u_max) {
    const double td = static_cast<double>(t);
    return td * (1.0 + td * u_max) * (1.0 + td * u_max);
}

double gronwall_lipschitz(std::span<const double> upper, std::int64_t t, double h) {
    if (static_cast<std::int64_t>(upper.size()) < t) {
        throw std::invalid_argument("gronwall_lipschitz: need t per-step values");
    }
    double sum = 0.0;
    for (std::int64_t k = 0; k < t; ++k) {
        sum += upper[static_cast<std::size_t>(k)] + h * sum;
    }
    return sum;
}

std::vector<RationalAngle> rational_anchors(const Interval& interval, bool odd_p,
                                            std::int64_t q_max, std::size_t limit) {
    std::vector<RationalAngle> out;
    const double pi = std::numbers::pi;
    for (std::int64_t q = 1; q <= q_max && out.size() < limit; ++q) {
        const auto qd = static_cast<double>(q);
        const auto p_first = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::floor(interval.lo * qd / pi)));
        const auto p_last = std::min<std::int64_t>(
            2 * q - 1, static_cast<std::int64_t>(std::ceil(interval.hi * qd / pi)));
        for (std::int64_t p = p_first; p <= p_last && out.size() < limit; ++p) {
            if (std::gcd(p, q) != 1) continue;
            if (((p % 2) != 0) != odd_p) continue;
            if (!odd_p && q == 1) continue;
            const RationalAngle angle(p, q);
            if (interval.contains(angle.radians())) out.push_back(angle);
        }
    }
    return out;
}

std::vector<std::pair<Vec2, Vec2>> basis_offset_pairs() {
    const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    return {{e1, e1}, {e1, e2}, {e2, e1}, {e2, e2}};
}

namespace {

void check_interval(const Interval& interval, int rank) {
    if (!(interval.width() > 0.0)) throw std::invalid_argument("stage interval has zero width");
    if (!(interval.lo >= 0.0 && interval.hi <= 2.0 * std::numbers::pi)) {
        throw std::invalid_argument("stage interval must lie in [0, 2pi]");
    }
    if (rank < 1) throw std::invalid_argument("stage rank must be >= 1");
}

GrowthOptions options_for(std::int64_t t, const BaireConfig& config) {
    GrowthOptions g = config.growth;
    if (t <= config.exact_time_limit) g.prune_tol = 0.0;
    return g;
}

// Upper values beta_k + eps_k for k < t, and the record at t.
struct Trace {
    std::vector<double> upper;
    GrowthRecord final;
};

Trace trace_growth(const SystemParams& params, std::int64_t t, const GrowthOptions& options) {
    Trace tr;
    tr.upper.reserve(static_cast<std::size_t>(t));
    HullEngine engine(params, options);
    tr.upper.push_back(0.0);
    for (std::int64_t k = 1; k < t; ++k) {
        const GrowthRecord& rec = engine.step();
        tr.upper.push_back(rec.beta + rec.eps);
    }
    tr.final = t > 0 ? engine.step() : engine.current();
    return tr;
}

std::vector<SystemParams> stage_systems(StageKind kind, double theta, const BaireConfig& config) {
    std::vector<SystemParams> out;
    if (kind == StageKind::Stabilizing) {
        for (const auto& [u, v] : basis_offset_pairs()) {
            out.push_back(SystemParams::from_cartesian(config.lambda, theta, u, v));
        }
    } else {
        out.push_back(SystemParams::from_cartesian(config.lambda, theta, config.w, config.w_prime));
    }
    return out;
}

double stage_u_max(StageKind kind, const BaireConfig& config) {
    if (kind == StageKind::Stabilizing) return 1.0;
    return std::max(config.w.norm(), config.w_prime.norm());
}

// Slack of the stage inequality at one theta plus what is needed for its Lipschitz bound.
struct CellData {
    double margin = 0.0;
    std::vector<Trace> traces;
};

struct StageSpec {
    StageKind kind;
    int rank;
    std::int64_t time;
    double threshold;  // a(t)/r or r*b(t)
};

CellData evaluate_cell(const StageSpec& spec, double theta, const BaireConfig& config) {
    CellData cell;
    const GrowthOptions g = options_for(spec.time, config);
    double value = 0.0;
    for (const auto& sys : stage_systems(spec.kind, theta, config)) {
        cell.traces.push_back(trace_growth(sys, spec.time, g));
        const GrowthRecord& rec = cell.traces.back().final;
        value = std::max(value, spec.kind == StageKind::Stabilizing ? rec.beta + rec.eps : rec.beta);
    }
    cell.margin = spec.kind == StageKind::Stabilizing ? spec.threshold - value
                                                      : value - spec.threshold;
    return cell;
}

double cell_lipschitz(const StageSpec& spec, const CellData& cell, double width,
                      const BaireConfig& config) {
    const double crude = lipschitz_bound(spec.time, stage_u_max(spec.kind, config));
    double worst = 0.0;
    for (const auto& tr : cell.traces) {
        worst = std::max(worst, std::min(crude, gronwall_lipschitz(tr.upper, spec.time, width)));
    }
    return worst;
}

// Share of the slack the Lipschitz term may use during construction; verify
// only demands L * width < margin.
constexpr double kConstructionSlack = 0.5;

StageCertificate build_cover(const StageSpec& spec, RationalAngle anchor, const Interval& parent,
                             const BaireConfig& config) {
    const double centre = anchor.radians();
    const CellData anchor_cell = evaluate_cell(spec, centre, config);
    if (!(anchor_cell.margin > 0.0)) {
        throw std::logic_error("stage inequality fails at its own anchor");
    }
    const double max_width =
        2.0 * std::min(centre - parent.lo, parent.hi - centre) * (1.0 - 1e-9);
    auto fits = [&](double width) {
        return cell_lipschitz(spec, anchor_cell, width, config) * width <=
               kConstructionSlack * anchor_cell.margin;
    };
    double width = max_width;
    if (!fits(width)) {
        double lo = 0.0, hi = max_width;
        for (int i = 0; i < 200; ++i) {
            const double trial = 0.5 * (lo + hi);
            (fits(trial) ? lo : hi) = trial;
        }
        width = lo;
    }
    if (!(width > std::abs(centre) * 1e-14)) {
        throw std::runtime_error("stage interval around " + std::to_string(centre) +
                                 " shrinks below floating-point resolution");
    }

    StageCertificate cert;
    cert.kind = spec.kind;
    cert.rank = spec.rank;
    cert.anchor = anchor;
    cert.time = spec.time;
    cert.margin = anchor_cell.margin;
    cert.lipschitz = cell_lipschitz(spec, anchor_cell, width, config);

    const std::int64_t per_cell =
        spec.time * static_cast<std::int64_t>(anchor_cell.traces.size());
    std::int64_t budget = config.extension_work - per_cell;
    int left = 0, right = 0;
    for (const int side : {-1, +1}) {
        int& count = side < 0 ? left : right;
        bool open = true;
        while (open && count < config.max_extension_cells) {
            const int batch =
                std::min(std::max(1, config.jobs), config.max_extension_cells - count);
            std::vector<double> centres;
            for (int k = 1; k <= batch; ++k) {
                const double c = centre + side * (count + k) * width;
                const Interval cell{c - 0.5 * width, c + 0.5 * width};
                if (!cell.strictly_inside(parent) || budget < per_cell) break;
                budget -= per_cell;
                centres.push_back(c);
            }
            if (centres.empty()) break;
            std::vector<std::optional<std::pair<double, double>>> results(centres.size());
            parallel_for(centres.size(), config.jobs, [&](std::size_t i) {
                const CellData cell = evaluate_cell(spec, centres[i], config);
                const double lip = cell_lipschitz(spec, cell, width, config);
                if (cell.margin > 0.0 && lip * width <= kConstructionSlack * cell.margin) {
                    results[i] = std::make_pair(cell.margin, lip);
                }
            });
            for (const auto& r : results) {
                if (!r) {
                    open = false;
                    break;
                }
                cert.margin = std::min(cert.margin, r->first);
                cert.lipschitz = std::max(cert.lipschitz, r->second);
                ++count;
            }
            if (static_cast<int>(centres.size()) < batch) open = false;
        }
    }
    cert.interval = {centre - 0.5 * width - left * width, centre + 0.5 * width + right * width};
    cert.cells = 1 + left + right;
    return cert;
}

}  // namespace

StageCertificate find_stabilizing_stage(const Interval& interval, int rank,
                                        const GrowthTarget& target, const BaireConfig& config) {
    check_interval(interval, rank);
    const auto anchors = rational_anchors(interval, /*odd_p=*/false, config.q_max,
                                          static_cast<std::size_t>(config.anchor_attempts));
    if (anchors.empty()) {
        throw std::runtime_error("no even-p anchor with q <= " + std::to_string(config.q_max) +
                                 " inside (" + std::to_string(interval.lo) + ", " +
                                 std::to_string(interval.hi) + ")");
    }
    std::ostringstream misses;
    for (const auto& anchor : anchors) {
        const auto systems = stage_systems(StageKind::Stabilizing, anchor.radians(), config);
        double bound = 0.0;
        for (const auto& sys : systems) {
            bound = std::max(bound, stability_certificate(sys, anchor).overall_bound);
        }
        std::vector<HullEngine> engines;
        for (const auto& sys : systems) engines.emplace_back(sys, config.growth);
        std::int64_t found = 0;
        double value = 0.0;
        for (std::int64_t t = 1; t <= config.time_guard; ++t) {
            value = 0.0;
            for (auto& e : engines) {
                const GrowthRecord& rec = e.step();
                if (rec.beta > bound + 1e-9) {
                    throw std::logic_error("reachable offsets exceed the stability bound");
                }
                value = std::max(value, rec.beta + rec.eps);
            }
            if (target.a(static_cast<double>(t)) > config.margin_factor * rank * value) {
                found = t;
                break;
            }
        }
        if (found == 0) {
            misses << " " << anchor.p() << "pi/" << anchor.q() << " (sup beta ~ " << value << ")";
            continue;
        }
        const StageSpec spec{StageKind::Stabilizing, rank, found,
                             target.a(static_cast<double>(found)) / rank};
        return build_cover(spec, anchor, interval, config);
    }
    throw std::runtime_error("stabilizing stage (rank " + std::to_string(rank) +
                             "): no anchor reached a(t) > margin * rank * beta within t <= " +
                             std::to_string(config.time_guard) + "; tried" + misses.str());
}

StageCertificate find_destabilizing_stage(const Interval& interval, int rank,
                                          const GrowthTarget& target, const BaireConfig& config) {
    check_interval(interval, rank);
    if (config.w_prime.norm() == 0.0) throw std::invalid_argument("w' must be nonzero");
    const auto anchors = rational_anchors(interval, /*odd_p=*/true, config.q_max, 64);
    std::optional<RationalAngle> chosen;
    for (const auto& anchor : anchors) {
        const SystemParams sys =
            SystemParams::from_cartesian(config.lambda, anchor.radians(), config.w, config.w_prime);
        if (std::abs(jordan_coupling(sys, anchor).coupling) >= kDegenerateCouplingTol) {
            chosen = anchor;
            break;
        }
    }
    if (!chosen) {
        throw std::runtime_error("no nondegenerate odd-p anchor with q <= " +
                                 std::to_string(config.q_max) + " inside (" +
                                 std::to_string(interval.lo) + ", " +
                                 std::to_string(interval.hi) + ")");
    }
    const SystemParams sys = SystemParams::from_cartesian(config.lambda, chosen->radians(),
                                                          config.w, config.w_prime);
    HullEngine engine(sys, config.growth);
    std::ostringstream trend;
    std::int64_t next = 1;
    for (;;) {
        while (engine.current().t < next) engine.step();
        const GrowthRecord& rec = engine.current();
        const double bt = target.b(static_cast<double>(rec.t));
        if (rec.beta > config.margin_factor * rank * bt) {
            const StageSpec spec{StageKind::Destabilizing, rank, rec.t, rank * bt};
            return build_cover(spec, *chosen, interval, config);
        }
        trend << " t=" << rec.t << ":" << rec.beta / static_cast<double>(rec.t);
        if (next > config.time_guard / 2) break;
        next *= 2;
    }
    throw std::runtime_error("destabilizing stage (rank " + std::to_string(rank) + ") at " +
                             std::to_string(chosen->p()) + "pi/" + std::to_string(chosen->q()) +
                             ": beta(t) never exceeded " + std::to_string(config.margin_factor) +
                             "*rank*b(t) up to t = " + std::to_string(config.time_guard) +
                             "; beta(t)/t trend:" + trend.str());
}

CertificateChain construct(const Interval& initial, int depth, const GrowthTarget& target,
                           const BaireConfig& config) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    CertificateChain chain;
    chain.initial = initial;
    chain.final_interval = initial;
    for (int rank = 1; rank <= depth; ++rank) {
        for (const StageKind kind : {StageKind::Stabilizing, StageKind::Destabilizing}) {
            try {
                StageCertificate stage =
                    kind == StageKind::Stabilizing
                        ? find_stabilizing_stage(chain.final_interval, rank, target, config)
                        : find_destabilizing_stage(chain.final_interval, rank, target, config);
                chain.final_interval = stage.interval;
                chain.stages.push_back(stage);
            } catch (const std::exception& e) {
                throw ConstructionError(std::string(to_string(kind)) + " stage, rank " +
                                            std::to_string(rank) + ": " + e.what(),
                                        chain);
            }
        }
    }
    return chain;
}

double stage_functional(const StageCertificate& stage, double theta, const BaireConfig& config) {
    const StageSpec spec{stage.kind, stage.rank, stage.time, 0.0};
    const CellData cell = evaluate_cell(spec, theta, config);
    // With threshold 0 the margin is -value (stabilizing) or value (destabilizing).
    return stage.kind == StageKind::Stabilizing ? -cell.margin : cell.margin;
}

VerifyReport verify(const CertificateChain& chain, const GrowthTarget& target,
                    const BaireConfig& config, VerifyOptions options) {
    VerifyReport report;
    auto fail = [&report](int stage, const std::string& why) {
        report.ok = false;
        report.failing_stage = stage;
        report.message = (stage >= 0 ? "stage " + std::to_string(stage) + ": " : "") + why;
        return report;
    };
    try {
        Interval parent = chain.initial;
        for (std::size_t i = 0; i < chain.stages.size(); ++i) {
            const auto idx = static_cast<int>(i);
            const StageCertificate& s = chain.stages[i];
            const StageKind expected_kind =
                i % 2 == 0 ? StageKind::Stabilizing : StageKind::Destabilizing;
            if (s.kind != expected_kind) return fail(idx, "stage kinds must alternate S, D");
            if (s.rank != idx / 2 + 1) return fail(idx, "ranks must run 1, 1, 2, 2, ...");
            if (!(s.interval.width() > 0.0) || !s.interval.strictly_inside(parent)) {
                return fail(idx, "interval is not strictly nested in its predecessor");
            }
            if (!s.interval.contains(s.anchor.radians())) {
                return fail(idx, "anchor lies outside the stage interval");
            }
            const bool want_odd = s.kind == StageKind::Destabilizing;
            if (s.anchor.p_is_odd() != want_odd || (!want_odd && s.anchor.q() == 1)) {
                return fail(idx, "anchor parity does not match the stage kind");
            }
            if (s.time < 1 || s.cells < 1 || !(s.margin > 0.0) || !(s.lipschitz >= 0.0)) {
                return fail(idx, "malformed certificate fields");
            }
            if (!(s.lipschitz * s.cell_width() < s.margin)) {
                return fail(idx, "recorded lipschitz * cell width is not below the margin");
            }
            if (s.kind == StageKind::Destabilizing) {
                const SystemParams sys = SystemParams::from_cartesian(
                    config.lambda, s.anchor.radians(), config.w, config.w_prime);
                if (std::abs(jordan_coupling(sys, s.anchor).coupling) < kDegenerateCouplingTol) {
                    return fail(idx, "anchor has degenerate Jordan coupling");
                }
            }

            const double td = static_cast<double>(s.time);
            const StageSpec spec{s.kind, s.rank, s.time,
                                 s.kind == StageKind::Stabilizing ? target.a(td) / s.rank
                                                                  : s.rank * target.b(td)};
            for (const double theta : {s.interval.lo, s.interval.mid(), s.interval.hi}) {
                const double margin = evaluate_cell(spec, theta, config).margin;
                if (!(margin > 0.0)) {
                    std::ostringstream os;
                    os << "inequality fails at theta = " << theta << " (slack " << margin << ")";
                    return fail(idx, os.str());
                }
            }
            if (options.recheck_cells) {
                const double width = s.cell_width();
                for (int c = 0; c < s.cells; ++c) {
                    const double centre = s.interval.lo + (c + 0.5) * width;
                    const CellData cell = evaluate_cell(spec, centre, config);
                    const double lip = cell_lipschitz(spec, cell, width, config);
                    if (!(cell.margin > 0.0 && lip * width < cell.margin)) {
                        std::ostringstream os;
                        os << "cell " << c << " around theta = " << centre
                           << " is not covered (slack " << cell.margin << ", L*h " << lip * width
                           << ")";
                        return fail(idx, os.str());
                    }
                }
            }
            parent = s.interval;
        }
        if (!(chain.final_interval == parent)) {
            return fail(-1, "final interval differs from the last stage interval");
        }
    } catch (const std::exception& e) {
        return fail(report.failing_stage, std::string("evaluation error: ") + e.what());
    }
    return report;
}

}  // namespace swgrowth
