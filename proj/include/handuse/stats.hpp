#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace handuse::stats {

/// Upper tail of the standard normal.
double normal_sf(double z);
/// Upper tail of the chi-square distribution; df >= 1.
double chi2_sf(double x, double df);
/// Upper tail of Student's t; df >= 1.
double student_t_sf(double t, double df);

/// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct TestResult {
    double statistic = 0;  // Z or chi-square
    std::optional<int> df;
    double p = 1;
    std::size_t n_effective = 0;
    /// p comes from the exact permutation distribution rather than an approximation.
    bool exact_p = false;
};

enum class PValueMethod : std::uint8_t {
    Auto,    // exact below kExactWilcoxonLimit non-zero pairs, normal otherwise
    Exact,
    Normal,
};

inline constexpr std::size_t kExactWilcoxonLimit = 20;

/// Paired signed-rank test on d = x - y. Zero differences are dropped and |d| ranked with
/// average ranks. The statistic is the tie-corrected normal Z with a 0.5 continuity
/// correction toward the mean; positive when x tends to exceed y. The two-sided p comes
/// from the exact conditional distribution of the positive-rank sum (small n) or the
/// normal approximation.
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                PValueMethod method = PValueMethod::Auto);

enum class Strength : std::uint8_t { Negligible, VeryWeak, Weak, Moderate, Strong, VeryStrong };
std::string_view to_string(Strength s);

/// Lower |rho| edges of each band above Negligible.
struct StrengthBands {
    double very_weak = 0.10;
    double weak = 0.20;
    double moderate = 0.40;
    double strong = 0.60;
    double very_strong = 0.80;
};

Strength strength_label(double rho, const StrengthBands& bands = {});

enum class Stars : std::uint8_t { None, One, Two, Three };
/// * p < .05, ** p < .01, *** p < .001
Stars stars_for(double p);
std::string_view to_string(Stars s);

enum class CellStatus : std::uint8_t { Ok, InsufficientN, Undefined };
std::string_view to_string(CellStatus s);

struct CorrelationCell {
    double rho = 0;
    double p = 1;
    std::size_t n = 0;
    Strength strength = Strength::Negligible;
    Stars stars = Stars::None;
    CellStatus status = CellStatus::Ok;
};

/// Spearman's rho with a two-sided t-approximation p-value. Pairs where either value is NaN
/// are dropped first. Throws ArgumentError for fewer than 3 pairs and
/// UndefinedCorrelationError when either variable is constant.
CorrelationCell spearman(std::span<const double> x, std::span<const double> y, const StrengthBands& bands = {});

/// Rows are blocks (participants), columns treatments (methods).
using ScoreMatrix = std::vector<std::vector<double>>;

/// Tie-corrected Friedman chi-square with k - 1 degrees of freedom.
TestResult friedman(const ScoreMatrix& scores);

struct PosthocResult {
    std::size_t method_i = 0;
    std::size_t method_j = 0;
    double mean_rank_difference = 0;  // mean rank i minus mean rank j
    double z = 0;
    double p_raw = 1;
    double p_adjusted = 1;
    bool significant = false;
};

struct PosthocReport {
    TestResult omnibus;
    /// False means the omnibus test was not significant and the comparisons are informational.
    bool omnibus_significant = false;
    std::vector<PosthocResult> comparisons;
};

/// Pairwise mean-rank comparisons after Friedman, Sidak-adjusted over k(k-1)/2 pairs.
PosthocReport dunn_sidak(const ScoreMatrix& scores, double alpha = 0.05);

/// 1 - (1 - p)^m, clamped to [p, 1].
double sidak_adjust(double p, std::size_t m);

/// Median and quartiles by linear interpolation between order statistics.
struct Quartiles {
    double q1 = 0;
    double median = 0;
    double q3 = 0;
};
double quantile(std::span<const double> sorted, double prob);
Quartiles quartiles(std::span<const double> values);

}  // namespace handuse::stats
