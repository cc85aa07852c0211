#include "swgrowth/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "swgrowth/classify.hpp"

namespace swgrowth {

std::vector<SwitchingWord> default_candidate_words(const SystemParams& params,
                                                   const SlopeBracketOptions& options) {
    std::vector<SwitchingWord> words;
    std::int64_t patterns = options.pattern_length;
    if (patterns == 0 && params.angle()) patterns = 2 * params.angle()->q();
    for (std::int64_t k = 1; k <= patterns; ++k) {
        words.push_back(SwitchingWord::repeat(1, static_cast<std::size_t>(k))
                            .then(SwitchingWord::repeat(0, 1)));
    }
    const Generators gens = build_generators(params);
    for (int t = 1; t <= options.brute_force_length; ++t) {
        const BruteForceResult best = brute_force(gens, t);
        words.push_back(best.alpha_word);
        if (!(best.beta_word == best.alpha_word)) words.push_back(best.beta_word);
    }
    return words;
}

double word_rate(const SwitchingWord& word, const Generators& gens) {
    if (word.empty()) return 0.0;
    return word_growth_coefficient(word_product(word, gens)) /
           static_cast<double>(word.length());
}

SlopeBracket slope_bracket(const SystemParams& params, const GrowthSeries& series,
                           const std::vector<SwitchingWord>& candidate_words) {
    if (series.horizon() < 1) throw std::invalid_argument("slope_bracket: horizon must be >= 1");
    SlopeBracket out;
    out.upper = std::numeric_limits<double>::infinity();
    for (std::int64_t t = 1; t <= series.horizon(); ++t) {
        const GrowthRecord& rec = series.at(t);
        const double value = rec.alpha_hi / static_cast<double>(t);
        if (value < out.upper) {
            out.upper = value;
            out.upper_time = t;
        }
    }
    const Generators gens = build_generators(params);
    for (const auto& word : candidate_words) {
        const double rate = word_rate(word, gens);
        if (rate > out.lower) {
            out.lower = rate;
            out.witness_word = word;
        }
    }
    return out;
}

SlopeBracket slope_bracket(const SystemParams& params, std::int64_t horizon,
                           std::optional<std::vector<SwitchingWord>> candidate_words,
                           const SlopeBracketOptions& options) {
    if (horizon < 1) throw std::invalid_argument("slope_bracket: horizon must be >= 1");
    const GrowthSeries series = growth_series(params, horizon, options.growth);
    if (!candidate_words) candidate_words = default_candidate_words(params, options);
    return slope_bracket(params, series, *candidate_words);
}

OscillationReport oscillation_report(const GrowthSeries& series, const Sequence& a,
                                     const Sequence& b) {
    OscillationReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    rep.inf_beta_over_a = inf;
    rep.sup_beta_over_b = -inf;
    rep.min_exponent = inf;
    rep.max_exponent = -inf;
    for (std::int64_t t = 1; t <= series.horizon(); ++t) {
        const double td = static_cast<double>(t);
        const double av = a(td);
        const double bv = b(td);
        if (!(av > 0.0) || !(bv > 0.0)) {
            throw std::invalid_argument("oscillation_report: sequences must be positive at t = " +
                                        std::to_string(t));
        }
        const GrowthRecord& rec = series.at(t);
        OscillationRow row;
        row.t = t;
        row.beta_over_a = rec.beta / av;
        row.beta_over_b = rec.beta / bv;
        const double alpha_mid = 0.5 * (rec.alpha_lo + rec.alpha_hi);
        row.exponent = t >= 2 ? std::log(alpha_mid) / std::log(td)
                              : std::numeric_limits<double>::quiet_NaN();
        if (row.beta_over_a < rep.inf_beta_over_a) {
            rep.inf_beta_over_a = row.beta_over_a;
            rep.argmin_beta_over_a = t;
        }
        if (row.beta_over_b > rep.sup_beta_over_b) {
            rep.sup_beta_over_b = row.beta_over_b;
            rep.argmax_beta_over_b = t;
        }
        if (t >= 2) {
            if (row.exponent < rep.min_exponent) {
                rep.min_exponent = row.exponent;
                rep.argmin_exponent = t;
            }
            if (row.exponent > rep.max_exponent) {
                rep.max_exponent = row.exponent;
                rep.argmax_exponent = t;
            }
        }
        rep.rows.push_back(row);
    }
    return rep;
}

OscillationReport oscillation_report(const SystemParams& params, std::int64_t horizon,
                                     const Sequence& a, const Sequence& b,
                                     GrowthOptions options) {
    return oscillation_report(growth_series(params, horizon, options), a, b);
}

}  // namespace swgrowth
