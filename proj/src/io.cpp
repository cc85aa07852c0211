#include "swgrowth/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace swgrowth::io {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

double parse_double(std::string_view text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

namespace {

std::int64_t parse_int(std::string_view text) {
    std::int64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// Reads the header and yields the data rows, each with exactly `columns` fields.
std::vector<std::vector<std::string>> read_table(std::istream& in, std::string_view header) {
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw std::invalid_argument("expected CSV header '" + std::string(header) + "'");
    }
    const std::size_t columns = split(std::string(header)).size();
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != columns) {
            throw std::invalid_argument("CSV row has " + std::to_string(fields.size()) +
                                        " fields, expected " + std::to_string(columns));
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

constexpr std::string_view kGrowthHeader = "t,beta,eps,alpha_lo,alpha_hi,beta_over_t";
constexpr std::string_view kSweepHeader = "p,q,theta,kind,coupling_or_kappa,bound_or_slope";
constexpr std::string_view kOracleHeader = "t,brute_beta,hull_beta,hull_eps,brute_alpha,status";

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }
Vec2 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }
Interval interval_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void write_growth_csv(std::ostream& out, const GrowthSeries& series) {
    out << kGrowthHeader << '\n';
    for (std::size_t i = 1; i < series.records.size(); ++i) {
        const GrowthRecord& r = series.records[i];
        out << r.t << ',' << format_double(r.beta) << ',' << format_double(r.eps) << ','
            << format_double(r.alpha_lo) << ',' << format_double(r.alpha_hi) << ','
            << format_double(r.beta / static_cast<double>(r.t)) << '\n';
    }
}

GrowthSeries read_growth_csv(std::istream& in) {
    GrowthSeries series;
    series.records.push_back(make_record(0, 0.0, 0.0));
    for (const auto& f : read_table(in, kGrowthHeader)) {
        GrowthRecord r;
        r.t = parse_int(f[0]);
        if (r.t != series.horizon() + 1) throw std::invalid_argument("growth CSV rows must run t = 1, 2, ...");
        r.beta = parse_double(f[1]);
        r.eps = parse_double(f[2]);
        r.alpha_lo = parse_double(f[3]);
        r.alpha_hi = parse_double(f[4]);
        series.records.push_back(r);
    }
    return series;
}

SweepRow sweep_row(RationalAngle angle, const Classification& c) {
    SweepRow row{angle.p(), angle.q(), angle.radians(), c.kind, 0.0, 0.0};
    if (const auto* s = std::get_if<StabilityCertificate>(&c.certificate)) {
        row.coupling_or_kappa = s->kappa;
        row.bound_or_slope = s->overall_bound;
    } else if (const auto* s = std::get_if<SlopeCertificate>(&c.certificate)) {
        row.coupling_or_kappa = s->coupling;
        row.bound_or_slope = s->slope_lower_bound;
    }
    return row;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << kSweepHeader << '\n';
    for (const SweepRow& r : rows) {
        out << r.p << ',' << r.q << ',' << format_double(r.theta) << ',' << to_string(r.kind) << ','
            << format_double(r.coupling_or_kappa) << ',' << format_double(r.bound_or_slope) << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::vector<SweepRow> rows;
    for (const auto& f : read_table(in, kSweepHeader)) {
        rows.push_back({parse_int(f[0]), parse_int(f[1]), parse_double(f[2]),
                        classification_kind_from_string(f[3]), parse_double(f[4]),
                        parse_double(f[5])});
    }
    return rows;
}

OracleRow oracle_row(int t, const BruteForceResult& brute, const GrowthRecord& hull, double tol) {
    OracleRow row{t, brute.beta, hull.beta, hull.eps, brute.alpha, false};
    row.pass = brute.beta >= hull.beta - tol && brute.beta <= hull.beta + hull.eps + tol &&
               brute.alpha >= brute.beta - tol && brute.alpha <= brute.beta + 1.0 + tol;
    return row;
}

void write_oracle_csv(std::ostream& out, std::span<const OracleRow> rows) {
    out << kOracleHeader << '\n';
    for (const OracleRow& r : rows) {
        out << r.t << ',' << format_double(r.brute_beta) << ',' << format_double(r.hull_beta) << ','
            << format_double(r.hull_eps) << ',' << format_double(r.brute_alpha) << ','
            << (r.pass ? "pass" : "FAIL") << '\n';
    }
}

std::vector<OracleRow> read_oracle_csv(std::istream& in) {
    std::vector<OracleRow> rows;
    for (const auto& f : read_table(in, kOracleHeader)) {
        if (f[5] != "pass" && f[5] != "FAIL") throw std::invalid_argument("bad oracle status");
        rows.push_back({static_cast<int>(parse_int(f[0])), parse_double(f[1]), parse_double(f[2]),
                        parse_double(f[3]), parse_double(f[4]), f[5] == "pass"});
    }
    return rows;
}

json to_json(const SystemParams& params) {
    json j{{"lambda", params.lambda()},
           {"theta", params.theta()},
           {"offset0", vec_json(params.offset0())},
           {"offset1", vec_json(params.offset1())},
           {"r", params.r()},
           {"phi", params.phi()}};
    if (params.angle()) {
        j["angle"] = {{"p", params.angle()->p()}, {"q", params.angle()->q()}};
    } else {
        j["angle"] = nullptr;
    }
    return j;
}

SystemParams system_params_from_json(const json& j) {
    const double lambda = j.at("lambda").get<double>();
    const double theta = j.at("theta").get<double>();
    const Vec2 offset0 = vec_from(j.at("offset0"));
    const Vec2 offset1 = vec_from(j.at("offset1"));
    // Whichever constructor built the original reproduces it bit for bit.
    SystemParams s = SystemParams::from_polar(lambda, theta, offset0, j.at("r").get<double>(),
                                              j.at("phi").get<double>());
    if (!(s.offset1() == offset1)) s = SystemParams::from_cartesian(lambda, theta, offset0, offset1);
    if (j.contains("angle") && !j["angle"].is_null()) {
        s = s.with_angle(RationalAngle(j["angle"].at("p").get<std::int64_t>(),
                                       j["angle"].at("q").get<std::int64_t>()));
    }
    return s;
}

json to_json(const Classification& c) {
    json j{{"kind", std::string(to_string(c.kind))}, {"certificate", nullptr}};
    if (const auto* s = std::get_if<StabilityCertificate>(&c.certificate)) {
        j["certificate"] = {{"type", "stability"},         {"kappa", s->kappa},
                            {"c1", s->c1},                 {"c2", s->c2},
                            {"overall_bound", s->overall_bound},
                            {"identity_residual", s->identity_residual}};
    } else if (const auto* s = std::get_if<SlopeCertificate>(&c.certificate)) {
        j["certificate"] = {{"type", "slope"},
                            {"q", s->q},
                            {"coupling", s->coupling},
                            {"slope_lower_bound", s->slope_lower_bound},
                            {"power_ratio", s->power_ratio},
                            {"power_check_exponent", s->power_check_exponent}};
    }
    return j;
}

Classification classification_from_json(const json& j) {
    Classification c;
    c.kind = classification_kind_from_string(j.at("kind").get<std::string>());
    const json& cert = j.at("certificate");
    if (cert.is_null()) return c;
    const auto type = cert.at("type").get<std::string>();
    if (type == "stability") {
        c.certificate = StabilityCertificate{cert.at("kappa").get<double>(), cert.at("c1").get<double>(),
                                             cert.at("c2").get<double>(),
                                             cert.at("overall_bound").get<double>(),
                                             cert.at("identity_residual").get<double>()};
    } else if (type == "slope") {
        c.certificate = SlopeCertificate{cert.at("q").get<std::int64_t>(),
                                         cert.at("coupling").get<double>(),
                                         cert.at("slope_lower_bound").get<double>(),
                                         cert.at("power_ratio").get<double>(),
                                         cert.at("power_check_exponent").get<std::uint64_t>()};
    } else {
        throw std::invalid_argument("unknown certificate type '" + type + "'");
    }
    return c;
}

json to_json(const SlopeBracket& b) {
    return {{"lower", b.lower},
            {"upper", b.upper},
            {"upper_time", b.upper_time},
            {"witness_word", b.witness_word.str()}};
}

json to_json(const ChainDocument& doc) {
    const BaireConfig& c = doc.config;
    json params{{"lambda", c.lambda},
                {"w", vec_json(c.w)},
                {"w_prime", vec_json(c.w_prime)},
                {"a_spec", doc.target.a.source()},
                {"b_spec", doc.target.b.source()},
                {"initial_interval", interval_json(doc.chain.initial)},
                {"margin_factor", c.margin_factor},
                {"q_max", c.q_max},
                {"time_guard", c.time_guard},
                {"anchor_attempts", c.anchor_attempts},
                {"max_extension_cells", c.max_extension_cells},
                {"extension_work", c.extension_work},
                {"exact_time_limit", c.exact_time_limit},
                {"prune_tol", c.growth.prune_tol},
                {"vertex_cap", c.growth.vertex_cap}};
    json stages = json::array();
    for (const StageCertificate& s : doc.chain.stages) {
        stages.push_back({{"kind", std::string(to_string(s.kind))},
                          {"rank", s.rank},
                          {"anchor", {{"p", s.anchor.p()}, {"q", s.anchor.q()}}},
                          {"time", s.time},
                          {"interval", interval_json(s.interval)},
                          {"margin", s.margin},
                          {"lipschitz", s.lipschitz},
                          {"cells", s.cells}});
    }
    return {{"version", kChainSchemaVersion},
            {"params", params},
            {"stages", stages},
            {"final_interval", interval_json(doc.chain.final_interval)}};
}

ChainDocument chain_document_from_json(const json& j) {
    if (j.at("version").get<int>() != kChainSchemaVersion) {
        throw std::invalid_argument("unsupported chain schema version");
    }
    ChainDocument doc;
    const json& p = j.at("params");
    BaireConfig& c = doc.config;
    c.lambda = p.at("lambda").get<double>();
    c.w = vec_from(p.at("w"));
    c.w_prime = vec_from(p.at("w_prime"));
    c.margin_factor = p.value("margin_factor", c.margin_factor);
    c.q_max = p.value("q_max", c.q_max);
    c.time_guard = p.value("time_guard", c.time_guard);
    c.anchor_attempts = p.value("anchor_attempts", c.anchor_attempts);
    c.max_extension_cells = p.value("max_extension_cells", c.max_extension_cells);
    c.extension_work = p.value("extension_work", c.extension_work);
    c.exact_time_limit = p.value("exact_time_limit", c.exact_time_limit);
    c.growth.prune_tol = p.value("prune_tol", c.growth.prune_tol);
    c.growth.vertex_cap = p.value("vertex_cap", c.growth.vertex_cap);
    doc.target.a = SequenceExpr::parse(p.at("a_spec").get<std::string>());
    doc.target.b = SequenceExpr::parse(p.at("b_spec").get<std::string>());
    doc.chain.initial = interval_from(p.at("initial_interval"));
    for (const json& s : j.at("stages")) {
        StageCertificate st;
        st.kind = stage_kind_from_string(s.at("kind").get<std::string>());
        st.rank = s.at("rank").get<int>();
        st.anchor = RationalAngle(s.at("anchor").at("p").get<std::int64_t>(),
                                  s.at("anchor").at("q").get<std::int64_t>());
        st.time = s.at("time").get<std::int64_t>();
        st.interval = interval_from(s.at("interval"));
        st.margin = s.at("margin").get<double>();
        st.lipschitz = s.at("lipschitz").get<double>();
        st.cells = s.value("cells", 1);
        doc.chain.stages.push_back(st);
    }
    doc.chain.final_interval = interval_from(j.at("final_interval"));
    return doc;
}

json to_json(const RunRecord& r) {
    json j{{"tool_version", r.tool_version}, {"command", r.command},
           {"arguments", r.arguments},       {"params", r.params},
           {"seed", nullptr},                {"started_at", r.started_at},
           {"finished_at", r.finished_at},   {"outputs", r.outputs},
           {"exit_status", r.exit_status}};
    if (r.seed) j["seed"] = *r.seed;
    return j;
}

RunRecord run_record_from_json(const json& j) {
    RunRecord r;
    r.tool_version = j.at("tool_version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.arguments = j.at("arguments").get<std::vector<std::string>>();
    r.params = j.at("params");
    if (!j.at("seed").is_null()) r.seed = j["seed"].get<std::uint64_t>();
    r.started_at = j.at("started_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    r.outputs = j.at("outputs").get<std::vector<std::string>>();
    r.exit_status = j.at("exit_status").get<int>();
    return r;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string growth_svg(const GrowthSeries& series, const std::string& title) {
    constexpr double width = 640, height = 400, pad = 50;
    const std::int64_t horizon = series.horizon();
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << pad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
        << "</text>\n";
    if (horizon < 1) {
        svg << "</svg>\n";
        return svg.str();
    }
    double y_max = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        y_max = std::max(y_max, series.at(t).alpha_hi / static_cast<double>(t));
    }
    if (y_max <= 0.0) y_max = 1.0;
    auto px = [&](std::int64_t t) {
        return pad + (width - 2 * pad) * (horizon == 1 ? 0.0 : double(t - 1) / double(horizon - 1));
    };
    auto py = [&](double v) { return height - pad - (height - 2 * pad) * v / y_max; };
    // Thin the polyline to at most ~2000 points.
    const std::int64_t stride = std::max<std::int64_t>(1, horizon / 2000);
    auto polyline = [&](auto value, const char* colour) {
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::int64_t t = 1; t <= horizon; t += stride) {
            svg << format_double(px(t)) << ',' << format_double(py(value(series.at(t)) / double(t))) << ' ';
        }
        svg << "\"/>\n";
    };
    polyline([](const GrowthRecord& r) { return r.alpha_hi; }, "#bbbbbb");
    polyline([](const GrowthRecord& r) { return r.alpha_lo; }, "#bbbbbb");
    polyline([](const GrowthRecord& r) { return r.beta; }, "#1f77b4");
    svg << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\"" << width - pad
        << "\" y2=\"" << height - pad << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
        << height - pad << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << width - pad << "\" y=\"" << height - pad + 20
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">t = " << horizon
        << "</text>\n<text x=\"" << pad - 5 << "\" y=\"" << pad
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
        << format_double(y_max) << "</text>\n</svg>\n";
    return svg.str();
}

}  // namespace swgrowth::io
