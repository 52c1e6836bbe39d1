#include "handuse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "handuse/error.hpp"

namespace handuse::stats {

double normal_sf(double z) {
    if (std::isnan(z)) throw ArgumentError("normal_sf: z is NaN");
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double chi2_sf(double x, double df) {
    if (!(df >= 1) || !std::isfinite(df)) throw ArgumentError("chi2_sf: df must be >= 1");
    if (std::isnan(x)) throw ArgumentError("chi2_sf: x is NaN");
    if (x <= 0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(df / 2.0, x / 2.0);
}

double student_t_sf(double t, double df) {
    if (!(df >= 1) || !std::isfinite(df)) throw ArgumentError("student_t_sf: df must be >= 1");
    if (std::isnan(t)) throw ArgumentError("student_t_sf: t is NaN");
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    boost::math::students_t_distribution<double> dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
        i = j;
    }
    return ranks;
}

namespace {

// Sum over tie groups of (t^3 - t).
double tie_term(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double term = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i]) ++j;
        const double t = static_cast<double>(j - i);
        term += t * t * t - t;
        i = j;
    }
    return term;
}

// Two-sided exact p for the positive-rank sum. Average ranks are multiples of 1/2, so
// doubled ranks are integers and the null distribution is a subset-sum count.
double exact_signed_rank_p(std::span<const double> ranks, double w_plus) {
    std::vector<std::int64_t> doubled;
    doubled.reserve(ranks.size());
    std::int64_t total = 0;
    for (double r : ranks) {
        doubled.push_back(std::llround(2.0 * r));
        total += doubled.back();
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    std::int64_t reach = 0;
    for (auto r : doubled) {
        for (std::int64_t s = reach; s >= 0; --s)
            if (counts[static_cast<std::size_t>(s)] != 0.0) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
        reach += r;
    }
    // Compare |2W - total| on the doubled integer scale.
    const std::int64_t observed = std::llabs(std::llround(4.0 * w_plus) - total);
    double tail = 0;
    for (std::int64_t s = 0; s <= total; ++s)
        if (std::llabs(2 * s - total) >= observed) tail += counts[static_cast<std::size_t>(s)];
    return std::min(1.0, std::ldexp(tail, -static_cast<int>(ranks.size())));
}

}  // namespace

TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, PValueMethod method) {
    if (x.size() != y.size()) throw ArgumentError("wilcoxon: samples differ in length");
    if (x.empty()) throw ArgumentError("wilcoxon: no pairs");
    std::vector<double> abs_d;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (!std::isfinite(d)) throw ArgumentError("wilcoxon: non-finite difference");
        if (d == 0) continue;
        abs_d.push_back(std::abs(d));
        positive.push_back(d > 0);
    }
    const std::size_t n = abs_d.size();
    if (n == 0) throw DegenerateSampleError("wilcoxon: all paired differences are zero");

    const auto ranks = average_ranks(abs_d);
    double w_plus = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (positive[i]) w_plus += ranks[i];
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1) / 4.0;
    const double var = nd * (nd + 1) * (2 * nd + 1) / 24.0 - tie_term(abs_d) / 48.0;

    TestResult r;
    r.n_effective = n;
    const double dev = w_plus - mean;
    const double corrected = std::max(std::abs(dev) - 0.5, 0.0);
    r.statistic = var > 0 ? std::copysign(corrected, dev) / std::sqrt(var) : 0.0;
    if (r.statistic == 0) r.statistic = 0;  // no negative zero

    const bool exact = method == PValueMethod::Exact || (method == PValueMethod::Auto && n < kExactWilcoxonLimit);
    if (exact) {
        if (n > 62) throw ArgumentError("wilcoxon: exact p limited to 62 non-zero pairs");
        r.p = exact_signed_rank_p(ranks, w_plus);
        r.exact_p = true;
    } else {
        r.p = std::min(1.0, 2.0 * normal_sf(std::abs(r.statistic)));
    }
    return r;
}

std::string_view to_string(Strength s) {
    switch (s) {
        case Strength::Negligible: return "negligible";
        case Strength::VeryWeak: return "very weak";
        case Strength::Weak: return "weak";
        case Strength::Moderate: return "moderate";
        case Strength::Strong: return "strong";
        case Strength::VeryStrong: return "very strong";
    }
    return "?";
}

Strength strength_label(double rho, const StrengthBands& b) {
    if (!(std::abs(rho) <= 1.0)) throw ArgumentError("strength_label: |rho| must be <= 1");
    const double a = std::abs(rho);
    if (a >= b.very_strong) return Strength::VeryStrong;
    if (a >= b.strong) return Strength::Strong;
    if (a >= b.moderate) return Strength::Moderate;
    if (a >= b.weak) return Strength::Weak;
    if (a >= b.very_weak) return Strength::VeryWeak;
    return Strength::Negligible;
}

Stars stars_for(double p) {
    if (p < 0.001) return Stars::Three;
    if (p < 0.01) return Stars::Two;
    if (p < 0.05) return Stars::One;
    return Stars::None;
}

std::string_view to_string(Stars s) {
    switch (s) {
        case Stars::None: return "";
        case Stars::One: return "*";
        case Stars::Two: return "**";
        case Stars::Three: return "***";
    }
    return "?";
}

std::string_view to_string(CellStatus s) {
    switch (s) {
        case CellStatus::Ok: return "ok";
        case CellStatus::InsufficientN: return "insufficient-n";
        case CellStatus::Undefined: return "undefined";
    }
    return "?";
}

CorrelationCell spearman(std::span<const double> x, std::span<const double> y, const StrengthBands& bands) {
    if (x.size() != y.size()) throw ArgumentError("spearman: samples differ in length");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) continue;
        xs.push_back(x[i]);
        ys.push_back(y[i]);
    }
    const std::size_t n = xs.size();
    if (n < 3) throw ArgumentError("spearman: need at least 3 complete pairs, got " + std::to_string(n));

    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double mean = (static_cast<double>(n) + 1) / 2.0;  // mean of any rank vector
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rx[i] - mean;
        const double b = ry[i] - mean;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx == 0 || syy == 0) throw UndefinedCorrelationError("spearman: constant input");

    CorrelationCell c;
    c.n = n;
    c.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (std::abs(c.rho) == 1.0) {
        c.p = 0.0;
    } else {
        const double df = static_cast<double>(n) - 2.0;
        const double t = c.rho * std::sqrt(df / (1.0 - c.rho * c.rho));
        c.p = std::min(1.0, 2.0 * student_t_sf(std::abs(t), df));
    }
    c.strength = strength_label(c.rho, bands);
    c.stars = stars_for(c.p);
    return c;
}

namespace {

void check_matrix(const ScoreMatrix& scores) {
    if (scores.size() < 2) throw ArgumentError("friedman: need at least 2 blocks");
    const std::size_t k = scores.front().size();
    if (k < 2) throw ArgumentError("friedman: need at least 2 treatments");
    for (const auto& row : scores) {
        if (row.size() != k) throw ArgumentError("friedman: ragged score matrix");
        for (double v : row)
            if (std::isnan(v)) throw ArgumentError("friedman: missing cell");
    }
}

// Column sums of within-block average ranks, plus the summed tie term.
std::vector<double> rank_sums(const ScoreMatrix& scores, double& ties) {
    const std::size_t k = scores.front().size();
    std::vector<double> sums(k, 0.0);
    ties = 0;
    for (const auto& row : scores) {
        const auto r = average_ranks(row);
        for (std::size_t j = 0; j < k; ++j) sums[j] += r[j];
        ties += tie_term(row);
    }
    return sums;
}

}  // namespace

TestResult friedman(const ScoreMatrix& scores) {
    check_matrix(scores);
    const double n = static_cast<double>(scores.size());
    const double k = static_cast<double>(scores.front().size());
    double ties = 0;
    const auto sums = rank_sums(scores, ties);
    double ssq = 0;
    for (double s : sums) ssq += s * s;
    const double uncorrected = 12.0 / (n * k * (k + 1)) * ssq - 3.0 * n * (k + 1);
    const double correction = 1.0 - ties / (n * k * (k * k - 1));

    TestResult r;
    r.df = static_cast<int>(k) - 1;
    r.n_effective = scores.size();
    if (correction <= 1e-12) {
        r.statistic = 0;
        r.p = 1;
        return r;
    }
    r.statistic = std::max(0.0, uncorrected / correction);
    r.p = chi2_sf(r.statistic, k - 1);
    return r;
}

double sidak_adjust(double p, std::size_t m) {
    if (m <= 1) return p;
    const double adj = -std::expm1(static_cast<double>(m) * std::log1p(-p));
    return std::clamp(adj, p, 1.0);
}

PosthocReport dunn_sidak(const ScoreMatrix& scores, double alpha) {
    PosthocReport out;
    out.omnibus = friedman(scores);
    out.omnibus_significant = out.omnibus.p < alpha;
    const double n = static_cast<double>(scores.size());
    const std::size_t k = scores.front().size();
    double ties = 0;
    const auto sums = rank_sums(scores, ties);
    const double se = std::sqrt(static_cast<double>(k) * static_cast<double>(k + 1) / (6.0 * n));
    const std::size_t m = k * (k - 1) / 2;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            PosthocResult r;
            r.method_i = i;
            r.method_j = j;
            r.mean_rank_difference = sums[i] / n - sums[j] / n;
            r.z = std::abs(r.mean_rank_difference) / se;
            r.p_raw = std::min(1.0, 2.0 * normal_sf(r.z));
            r.p_adjusted = sidak_adjust(r.p_raw, m);
            r.significant = r.p_adjusted < alpha;
            out.comparisons.push_back(r);
        }
    }
    return out;
}

double quantile(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Quartiles quartiles(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    return {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
}

}  // namespace handuse::stats
