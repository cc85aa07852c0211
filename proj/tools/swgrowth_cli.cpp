// swgrowth: growth series, classification, sweeps, certificate chains and the
// brute-force oracle for two-generator affine-triangular switched systems.
//
// Exit status: 0 success, 1 a check failed (verify, oracle), 2 usage or I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "swgrowth/asymptotics.hpp"
#include "swgrowth/baire.hpp"
#include "swgrowth/classify.hpp"
#include "swgrowth/growth.hpp"
#include "swgrowth/io.hpp"
#include "swgrowth/parallel.hpp"
#include "swgrowth/sampling.hpp"

namespace fs = std::filesystem;
using namespace swgrowth;
using io::json;

namespace {

struct ParamFlags {
    double lambda = 0.0;
    std::optional<double> theta;
    std::optional<std::int64_t> p;
    std::optional<std::int64_t> q;
    double a = 0.0;
    double b = 1.0;
    double r = 1.0;
    double phi = 0.0;
};

struct CommonFlags {
    std::string out = ".";
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    double prune_tol = 1e-10;
};

void add_offset_flags(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("--lambda", f.lambda, "Diagonal entry of A0, |lambda| < 1")->capture_default_str();
    cmd->add_option("--a", f.a, "First offset component of A0")->capture_default_str();
    cmd->add_option("--b", f.b, "Second offset component of A0")->capture_default_str();
    cmd->add_option("--r", f.r, "Offset length of A1")->capture_default_str();
    cmd->add_option("--phi", f.phi, "Offset angle of A1")->capture_default_str();
}

void add_angle_flags(CLI::App* cmd, ParamFlags& f) {
    auto* theta = cmd->add_option("--theta", f.theta, "Rotation angle of A1 in radians");
    auto* p = cmd->add_option("--p", f.p, "Rational angle numerator (theta = p pi / q)");
    auto* q = cmd->add_option("--q", f.q, "Rational angle denominator");
    theta->excludes(p)->excludes(q);
    p->needs(q);
    q->needs(p);
}

void add_common_flags(CLI::App* cmd, CommonFlags& c, bool prune = true) {
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "Seed for random draws (recorded)");
    if (prune) {
        cmd->add_option("--prune-tol", c.prune_tol, "Hull pruning tolerance")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
    }
}

std::optional<RationalAngle> rational_angle(const ParamFlags& f) {
    if (f.p && f.q) return RationalAngle(*f.p, *f.q);
    return std::nullopt;
}

SystemParams build_params(const ParamFlags& f) {
    if (auto angle = rational_angle(f)) {
        return SystemParams::from_rational(f.lambda, *angle, {f.a, f.b}, f.r, f.phi);
    }
    if (!f.theta) throw CLI::ValidationError("--theta or --p/--q is required");
    return SystemParams::from_polar(f.lambda, *f.theta, {f.a, f.b}, f.r, f.phi);
}

fs::path prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory '" + dir + "'");
    }
    return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

/// Collects the RunRecord for one invocation.
class Run {
public:
    Run(std::string command, std::vector<std::string> arguments, const CommonFlags& common) {
        record_.tool_version = SWGROWTH_VERSION;
        record_.command = std::move(command);
        record_.arguments = std::move(arguments);
        record_.seed = common.seed;
        record_.started_at = io::utc_timestamp();
    }

    json& params() { return record_.params; }

    void emit(const fs::path& dir, const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        record_.outputs.push_back(name);
    }

    int finish(const fs::path& dir, int status) {
        record_.finished_at = io::utc_timestamp();
        record_.exit_status = status;
        write_file(dir / (record_.command + "_run.json"), io::to_json(record_).dump(2) + "\n");
        return status;
    }

private:
    io::RunRecord record_;
};

std::string classification_summary(RationalAngle angle, const Classification& c) {
    std::ostringstream os;
    os << "theta = " << angle.p() << "pi/" << angle.q() << ": " << to_string(c.kind) << "\n";
    if (const auto* s = std::get_if<StabilityCertificate>(&c.certificate)) {
        os << "  kappa = " << s->kappa << ", C1 = " << s->c1 << ", C2 = " << s->c2
           << "\n  every product norm <= C1^2 C2 = " << s->overall_bound
           << "\n  max |A1^q - I| = " << s->identity_residual << "\n";
    } else if (const auto* s = std::get_if<SlopeCertificate>(&c.certificate)) {
        os << "  Jordan coupling = " << s->coupling << "\n  growth slope >= " << s->slope_lower_bound
           << "\n  ||(A0 A1^q)^m|| / m at m = " << s->power_check_exponent << ": " << s->power_ratio
           << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- growth

int cmd_growth(const ParamFlags& pf, const CommonFlags& cf, std::int64_t horizon, bool svg,
               const std::vector<std::string>& args) {
    const SystemParams params = build_params(pf);
    const fs::path dir = prepare_out(cf.out);
    Run run("growth", args, cf);
    run.params() = {{"system", io::to_json(params)}, {"T", horizon}, {"prune_tol", cf.prune_tol}};

    GrowthOptions options;
    options.prune_tol = cf.prune_tol;
    const GrowthSeries series = growth_series(params, horizon, options);
    std::ostringstream csv;
    io::write_growth_csv(csv, series);
    run.emit(dir, "growth.csv", csv.str());
    if (svg) run.emit(dir, "growth.svg", io::growth_svg(series, "beta_t / t and alpha_t / t bracket"));

    if (horizon > 0) {
        const GrowthRecord& last = series.at(horizon);
        std::cout << "t = " << last.t << ": beta = " << last.beta << " (+ eps " << last.eps
                  << "), beta/t = " << last.beta / static_cast<double>(last.t) << "\n";
    }
    return run.finish(dir, 0);
}

// ---------------------------------------------------------------- classify

int cmd_classify(const ParamFlags& pf, const CommonFlags& cf, const std::vector<std::string>& args) {
    const auto angle = rational_angle(pf);
    if (!angle) throw CLI::ValidationError("classify needs --p and --q");
    const SystemParams params = build_params(pf);
    const fs::path dir = prepare_out(cf.out);
    Run run("classify", args, cf);
    run.params() = {{"system", io::to_json(params)}};

    const Classification c = classify(params, *angle);
    run.emit(dir, "classification.json", io::to_json(c).dump(2) + "\n");
    std::cout << classification_summary(*angle, c);
    return run.finish(dir, 0);
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const ParamFlags& pf, const CommonFlags& cf, std::int64_t q_max, std::int64_t horizon,
              const std::vector<std::string>& args) {
    if (q_max < 1) throw CLI::ValidationError("--q-max must be >= 1");
    const SystemParams base =
        SystemParams::from_polar(pf.lambda, std::numbers::pi, {pf.a, pf.b}, pf.r, pf.phi);
    const fs::path dir = prepare_out(cf.out);
    Run run("sweep", args, cf);
    run.params() = {{"system", io::to_json(base)}, {"q_max", q_max}, {"T", horizon},
                    {"prune_tol", cf.prune_tol}};

    std::vector<RationalAngle> angles;
    for (std::int64_t q = 1; q <= q_max; ++q) {
        for (std::int64_t p = 1; p < 2 * q; ++p) {
            if (std::gcd(p, q) == 1) angles.emplace_back(p, q);
        }
    }
    std::vector<io::SweepRow> rows(angles.size());
    std::vector<GrowthRecord> finals(angles.size());
    GrowthOptions options;
    options.prune_tol = cf.prune_tol;
    parallel_for(angles.size(), cf.jobs, [&](std::size_t i) {
        const SystemParams params = base.with_angle(angles[i]);
        rows[i] = io::sweep_row(angles[i], classify(params, angles[i]));
        if (horizon > 0) {
            HullEngine engine(params, options);
            while (engine.current().t < horizon) engine.step();
            finals[i] = engine.current();
        }
    });

    std::ostringstream csv;
    io::write_sweep_csv(csv, rows);
    run.emit(dir, "sweep.csv", csv.str());
    if (horizon > 0) {
        std::ostringstream g;
        g << "p,q,theta,beta_T,eps_T,beta_over_T\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            g << rows[i].p << ',' << rows[i].q << ',' << io::format_double(rows[i].theta) << ','
              << io::format_double(finals[i].beta) << ',' << io::format_double(finals[i].eps) << ','
              << io::format_double(finals[i].beta / static_cast<double>(horizon)) << '\n';
        }
        run.emit(dir, "sweep_growth.csv", g.str());
    }

    std::map<ClassificationKind, int> counts;
    for (const auto& r : rows) ++counts[r.kind];
    std::cout << rows.size() << " angles with q <= " << q_max << ":";
    for (const auto& [kind, n] : counts) std::cout << " " << to_string(kind) << "=" << n;
    std::cout << "\n";
    return run.finish(dir, 0);
}

// ---------------------------------------------------------------- construct / verify

struct ConstructFlags {
    std::vector<double> interval{2.0, 3.3};
    int depth = 1;
    std::string a_seq = "1+log(t)";
    std::string b_seq = "t/(1+log(t))";
    std::vector<double> w{0.0, 1.0};
    std::vector<double> w_prime{1.0, 0.0};
    double margin_factor = 2.0;
    std::int64_t q_max = 10'000;
    std::int64_t time_guard = 10'000'000;
};

int report_verify(const VerifyReport& report) {
    if (report.ok) {
        std::cout << "verify: ok\n";
        return 0;
    }
    std::cout << "verify: FAILED (" << report.message << ")\n";
    return 1;
}

void print_chain(const CertificateChain& chain) {
    for (const auto& s : chain.stages) {
        std::cout << "  " << to_string(s.kind) << " rank " << s.rank << ": anchor " << s.anchor.p()
                  << "pi/" << s.anchor.q() << ", t = " << s.time << ", interval [" << s.interval.lo
                  << ", " << s.interval.hi << "], margin " << s.margin << ", " << s.cells
                  << " cell(s)\n";
    }
}

int cmd_construct(const ConstructFlags& f, double lambda, const CommonFlags& cf,
                  const std::vector<std::string>& args) {
    io::ChainDocument doc;
    doc.target = {SequenceExpr::parse(f.a_seq), SequenceExpr::parse(f.b_seq)};
    BaireConfig& config = doc.config;
    config.lambda = lambda;
    config.w = {f.w[0], f.w[1]};
    config.w_prime = {f.w_prime[0], f.w_prime[1]};
    config.margin_factor = f.margin_factor;
    config.q_max = f.q_max;
    config.time_guard = f.time_guard;
    config.growth.prune_tol = cf.prune_tol;
    config.jobs = cf.jobs;
    const Interval initial{f.interval[0], f.interval[1]};
    if (!(initial.lo < initial.hi)) throw CLI::ValidationError("--interval needs lo < hi");

    const fs::path dir = prepare_out(cf.out);
    Run run("construct", args, cf);
    int status = 0;
    try {
        doc.chain = construct(initial, f.depth, doc.target, config);
    } catch (const ConstructionError& e) {
        doc.chain = e.partial();
        std::cerr << "construct: " << e.what() << "\n";
        status = 1;
    }
    json chain_json = io::to_json(doc);
    run.params() = chain_json["params"];
    run.params()["depth"] = f.depth;
    print_chain(doc.chain);
    if (status == 0) {
        status = report_verify(verify(doc.chain, doc.target, config));
    } else {
        chain_json["incomplete"] = true;
    }
    run.emit(dir, "chain.json", chain_json.dump(2) + "\n");
    return run.finish(dir, status);
}

int cmd_verify(const std::string& chain_path, bool recheck, int jobs) {
    std::ifstream in(chain_path);
    if (!in) throw std::runtime_error("cannot read '" + chain_path + "'");
    const json j = json::parse(in);
    io::ChainDocument doc = io::chain_document_from_json(j);
    doc.config.jobs = jobs;
    if (j.value("incomplete", false)) std::cout << "note: chain is marked incomplete\n";
    print_chain(doc.chain);
    return report_verify(verify(doc.chain, doc.target, doc.config, {recheck}));
}

// ---------------------------------------------------------------- oracle

int cmd_oracle(const ParamFlags& pf, const CommonFlags& cf, int t_max, int draws,
               const std::vector<std::string>& args) {
    if (t_max < 0 || t_max > kBruteForceMaxLength) {
        throw CLI::ValidationError("--t-max must lie in [0, " +
                                   std::to_string(kBruteForceMaxLength) + "]");
    }
    std::vector<SystemParams> systems;
    if (draws > 0) {
        if (!cf.seed) throw CLI::ValidationError("--draws needs --seed");
        std::mt19937_64 rng(*cf.seed);
        for (int i = 0; i < draws; ++i) systems.push_back(random_params(rng));
    } else {
        systems.push_back(build_params(pf));
    }
    const fs::path dir = prepare_out(cf.out);
    Run run("oracle", args, cf);
    json sys = json::array();
    for (const auto& s : systems) sys.push_back(io::to_json(s));
    run.params() = {{"systems", sys}, {"t_max", t_max}, {"prune_tol", cf.prune_tol}};

    constexpr double tol = 1e-9;
    GrowthOptions options;
    options.prune_tol = cf.prune_tol;
    std::vector<std::vector<io::OracleRow>> tables(systems.size());
    parallel_for(systems.size(), cf.jobs, [&](std::size_t i) {
        const GrowthSeries series = growth_series(systems[i], t_max, options);
        for (int t = 0; t <= t_max; ++t) {
            tables[i].push_back(io::oracle_row(t, brute_force(systems[i], t), series.at(t), tol));
        }
    });

    int failures = 0;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        std::ostringstream csv;
        io::write_oracle_csv(csv, tables[i]);
        const std::string name =
            systems.size() == 1 ? "oracle.csv" : "oracle_" + std::to_string(i) + ".csv";
        run.emit(dir, name, csv.str());
        for (const auto& row : tables[i]) {
            if (!row.pass) {
                ++failures;
                std::cout << "mismatch: draw " << i << ", t = " << row.t << ": brute " << row.brute_beta
                          << ", hull " << row.hull_beta << " + " << row.hull_eps << "\n";
            }
        }
    }
    std::cout << (failures == 0 ? "oracle: all rows agree" : "oracle: mismatches found") << " ("
              << systems.size() << " system(s), t <= " << t_max << ")\n";
    return run.finish(dir, failures == 0 ? 0 : 1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Growth, classification and certificate tools for switched affine systems"};
    app.set_version_flag("--version", std::string(SWGROWTH_VERSION));
    app.require_subcommand(1);
    const std::vector<std::string> args(argv + 1, argv + argc);

    ParamFlags pf;
    CommonFlags cf;

    auto* growth = app.add_subcommand("growth", "Reachable-offset growth series");
    std::int64_t horizon = 1000;
    bool svg = false;
    add_offset_flags(growth, pf);
    add_angle_flags(growth, pf);
    add_common_flags(growth, cf);
    growth->add_option("--T", horizon, "Horizon")->capture_default_str()->check(CLI::NonNegativeNumber);
    growth->add_flag("--svg", svg, "Also write an SVG chart");

    auto* classify_cmd = app.add_subcommand("classify", "Classify a rational angle p pi / q");
    add_offset_flags(classify_cmd, pf);
    add_angle_flags(classify_cmd, pf);
    add_common_flags(classify_cmd, cf, false);

    auto* sweep = app.add_subcommand("sweep", "Classify every reduced p pi / q with q <= q-max");
    std::int64_t q_max = 9;
    std::int64_t sweep_horizon = 0;
    add_offset_flags(sweep, pf);
    add_common_flags(sweep, cf);
    sweep->add_option("--q-max", q_max, "Largest denominator")->capture_default_str();
    sweep->add_option("--T", sweep_horizon, "Also record beta_T for each angle (0 = skip)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);

    auto* construct_cmd = app.add_subcommand("construct", "Build and verify a certificate chain");
    ConstructFlags ctf;
    construct_cmd->add_option("--lambda", pf.lambda, "Diagonal entry of A0")->capture_default_str();
    construct_cmd->add_option("--interval", ctf.interval, "Initial theta interval lo hi")
        ->expected(2)
        ->capture_default_str();
    construct_cmd->add_option("--depth", ctf.depth, "Number of S/D stage pairs")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    construct_cmd->add_option("--a-seq", ctf.a_seq, "Slow sequence a(t)")->capture_default_str();
    construct_cmd->add_option("--b-seq", ctf.b_seq, "Fast sequence b(t)")->capture_default_str();
    construct_cmd->add_option("--w", ctf.w, "Offset of A0 for destabilising stages")
        ->expected(2)
        ->capture_default_str();
    construct_cmd->add_option("--w-prime", ctf.w_prime, "Offset of A1 for destabilising stages")
        ->expected(2)
        ->capture_default_str();
    construct_cmd->add_option("--margin-factor", ctf.margin_factor)->capture_default_str();
    construct_cmd->add_option("--q-max", ctf.q_max, "Largest anchor denominator")->capture_default_str();
    construct_cmd->add_option("--time-guard", ctf.time_guard, "Largest certified time")
        ->capture_default_str();
    add_common_flags(construct_cmd, cf);

    auto* verify_cmd = app.add_subcommand("verify", "Re-verify a chain.json from scratch");
    std::string chain_path;
    bool endpoints_only = false;
    verify_cmd->add_option("chain", chain_path, "chain.json written by construct")->required();
    verify_cmd->add_flag("--endpoints-only", endpoints_only, "Skip the per-cell recheck");
    verify_cmd->add_option("--jobs", cf.jobs)->capture_default_str();

    auto* oracle = app.add_subcommand("oracle", "Compare the hull engine with brute force");
    int t_max = 12;
    int draws = 0;
    add_offset_flags(oracle, pf);
    add_angle_flags(oracle, pf);
    double oracle_prune_tol = 0.0;
    add_common_flags(oracle, cf, false);
    oracle->add_option("--prune-tol", oracle_prune_tol, "Hull pruning tolerance")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    oracle->add_option("--t-max", t_max, "Largest word length")->capture_default_str();
    oracle->add_option("--draws", draws, "Random parameter draws instead of the given system (needs --seed)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (growth->parsed()) return cmd_growth(pf, cf, horizon, svg, args);
        if (classify_cmd->parsed()) return cmd_classify(pf, cf, args);
        if (sweep->parsed()) return cmd_sweep(pf, cf, q_max, sweep_horizon, args);
        if (construct_cmd->parsed()) return cmd_construct(ctf, pf.lambda, cf, args);
        if (verify_cmd->parsed()) return cmd_verify(chain_path, !endpoints_only, cf.jobs);
        if (oracle->parsed()) {
            cf.prune_tol = oracle_prune_tol;
            return cmd_oracle(pf, cf, t_max, draws, args);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
