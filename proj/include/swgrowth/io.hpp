#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "swgrowth/asymptotics.hpp"
#include "swgrowth/baire.hpp"
#include "swgrowth/classify.hpp"
#include "swgrowth/core.hpp"
#include "swgrowth/growth.hpp"

namespace swgrowth::io {

using nlohmann::json;

inline constexpr int kChainSchemaVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
/// Throws std::invalid_argument on anything but a complete number.
double parse_double(std::string_view text);

// ---- growth series: t,beta,eps,alpha_lo,alpha_hi,beta_over_t (rows t = 1..T)

void write_growth_csv(std::ostream& out, const GrowthSeries& series);
GrowthSeries read_growth_csv(std::istream& in);

// ---- sweep atlas: p,q,theta,kind,coupling_or_kappa,bound_or_slope

struct SweepRow {
    std::int64_t p = 0;
    std::int64_t q = 1;
    double theta = 0.0;
    ClassificationKind kind = ClassificationKind::OutOfScopeAngle;
    double coupling_or_kappa = 0.0;
    double bound_or_slope = 0.0;

    bool operator==(const SweepRow&) const = default;
};

SweepRow sweep_row(RationalAngle angle, const Classification& c);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

// ---- oracle table: t,brute_beta,hull_beta,hull_eps,brute_alpha,status

struct OracleRow {
    int t = 0;
    double brute_beta = 0.0;
    double hull_beta = 0.0;
    double hull_eps = 0.0;
    double brute_alpha = 0.0;
    bool pass = false;

    bool operator==(const OracleRow&) const = default;
};

/// brute beta must lie in [hull beta - tol, hull beta + eps + tol] and
/// brute alpha in [beta, beta + 1] (with the same tolerance).
OracleRow oracle_row(int t, const BruteForceResult& brute, const GrowthRecord& hull, double tol);
void write_oracle_csv(std::ostream& out, std::span<const OracleRow> rows);
std::vector<OracleRow> read_oracle_csv(std::istream& in);

// ---- JSON documents

json to_json(const SystemParams& params);
SystemParams system_params_from_json(const json& j);

json to_json(const Classification& c);
Classification classification_from_json(const json& j);

json to_json(const SlopeBracket& b);

/// Everything needed to re-verify a chain.
struct ChainDocument {
    CertificateChain chain;
    GrowthTarget target;
    BaireConfig config;
};

json to_json(const ChainDocument& doc);
/// Throws std::invalid_argument (or nlohmann::json::exception) on schema errors.
ChainDocument chain_document_from_json(const json& j);

struct RunRecord {
    std::string tool_version;
    std::string command;
    std::vector<std::string> arguments;
    json params = json::object();
    std::optional<std::uint64_t> seed;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
    int exit_status = 0;
};

json to_json(const RunRecord& r);
RunRecord run_record_from_json(const json& j);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

/// Line chart of beta/t with the alpha/t bracket.
std::string growth_svg(const GrowthSeries& series, const std::string& title);

}  // namespace swgrowth::io
