#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "swgrowth/core.hpp"
#include "swgrowth/growth.hpp"

namespace swgrowth {

/// Positive sequence t -> value, evaluated at integer times.
using Sequence = std::function<double(double)>;

/// Two-sided bracket on lim alpha_t / t.
struct SlopeBracket {
    double lower = 0.0;             // best word-power growth rate found
    double upper = 0.0;             // min over t of (beta + eps + 1) / t
    std::int64_t upper_time = 0;    // the minimising t
    SwitchingWord witness_word;     // attains `lower`
};

struct SlopeBracketOptions {
    GrowthOptions growth;
    /// Patterns 1^k 0 (A1 k times, then A0) for k = 1..pattern_length; 0 means 2q
    /// when the angle is rational and no patterns otherwise.
    std::int64_t pattern_length = 0;
    /// Brute-force maximising words for t = 1..brute_force_length join the pool.
    int brute_force_length = 14;
};

/// Candidate words used when none are supplied.
std::vector<SwitchingWord> default_candidate_words(const SystemParams& params,
                                                   const SlopeBracketOptions& options = {});

/// Rate lim ||W^m|| / (m |w|) of the word's powers; a lower bound on lim alpha_t / t.
double word_rate(const SwitchingWord& word, const Generators& gens);

SlopeBracket slope_bracket(const SystemParams& params, std::int64_t horizon,
                           std::optional<std::vector<SwitchingWord>> candidate_words = std::nullopt,
                           const SlopeBracketOptions& options = {});

/// Same, reusing an already computed growth series (horizon = series.horizon()).
SlopeBracket slope_bracket(const SystemParams& params, const GrowthSeries& series,
                           const std::vector<SwitchingWord>& candidate_words);

struct OscillationRow {
    std::int64_t t = 0;
    double beta_over_a = 0.0;
    double beta_over_b = 0.0;
    double exponent = 0.0;  // log(alpha_mid) / log t; NaN at t = 1
};

struct OscillationReport {
    std::vector<OscillationRow> rows;  // t = 1..T
    double inf_beta_over_a = 0.0;
    std::int64_t argmin_beta_over_a = 0;
    double sup_beta_over_b = 0.0;
    std::int64_t argmax_beta_over_b = 0;
    double min_exponent = 0.0;
    std::int64_t argmin_exponent = 0;
    double max_exponent = 0.0;
    std::int64_t argmax_exponent = 0;
};

/// Throws std::invalid_argument when a or b is not positive on [1, T].
OscillationReport oscillation_report(const GrowthSeries& series, const Sequence& a,
                                     const Sequence& b);
OscillationReport oscillation_report(const SystemParams& params, std::int64_t horizon,
                                     const Sequence& a, const Sequence& b,
                                     GrowthOptions options = {});

}  // namespace swgrowth
