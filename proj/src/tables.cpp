#include "surprise/tables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "surprise/special.hpp"

namespace surprise {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

// G^2 of a 2x2 given raw cells; margins assumed nonzero by the caller.
double g2_stat_2x2(double a, double b, double c, double d) {
    const double n = a + b + c + d;
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    double s = 0.0;
    if (a > 0) s += a * std::log(a * n / (r1 * c1));
    if (b > 0) s += b * std::log(b * n / (r1 * c2));
    if (c > 0) s += c * std::log(c * n / (r2 * c1));
    if (d > 0) s += d * std::log(d * n / (r2 * c2));
    return 2.0 * s;
}

}  // namespace

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols,
                                   std::vector<std::int64_t> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (rows_ < 2 || cols_ < 2) {
        throw std::invalid_argument("ContingencyTable: need at least 2 rows and 2 columns");
    }
    if (cells_.size() != rows_ * cols_) {
        throw std::invalid_argument("ContingencyTable: cell count does not match dimensions");
    }
    row_sums_.assign(rows_, 0);
    col_sums_.assign(cols_, 0);
    total_ = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            const std::int64_t t = at(i, j);
            if (t < 0) throw std::invalid_argument("ContingencyTable: negative cell");
            row_sums_[i] += t;
            col_sums_[j] += t;
            total_ += t;
        }
    }
    if (total_ == 0) throw std::invalid_argument("ContingencyTable: all cells are zero");
}

ContingencyTable ContingencyTable::from_2x2(std::int64_t a, std::int64_t b,
                                            std::int64_t c, std::int64_t d) {
    return ContingencyTable(2, 2, {a, b, c, d});
}

bool ContingencyTable::has_zero_margin() const {
    for (auto r : row_sums_) if (r == 0) return true;
    for (auto c : col_sums_) if (c == 0) return true;
    return false;
}

ContingencyTable ContingencyTable::transposed() const {
    std::vector<std::int64_t> t(rows_ * cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t[j * rows_ + i] = at(i, j);
    return ContingencyTable(cols_, rows_, std::move(t));
}

ContingencyTable ContingencyTable::parse_tsv(const std::string& text) {
    std::vector<std::vector<std::int64_t>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<std::int64_t> row;
        double v;
        while (ls >> v) {
            if (v != std::floor(v) || v < 0) {
                throw std::invalid_argument("table parse: cells must be non-negative integers");
            }
            row.push_back(static_cast<std::int64_t>(v));
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("table parse: no rows");
    const std::size_t cols = rows.front().size();
    std::vector<std::int64_t> cells;
    for (const auto& r : rows) {
        if (r.size() != cols) throw std::invalid_argument("table parse: ragged rows");
        cells.insert(cells.end(), r.begin(), r.end());
    }
    return ContingencyTable(rows.size(), cols, std::move(cells));
}

namespace {

// Summing per-cell terms in sorted order makes the statistic bit-identical
// under transposition and row/column permutation (same term multiset).
double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

}  // namespace

TestResult g2_test(const ContingencyTable& table) {
    if (table.has_zero_margin()) {
        throw std::invalid_argument("g2_test: table has an empty row or column");
    }
    const double n = static_cast<double>(table.total());
    std::vector<double> terms;
    terms.reserve(table.rows() * table.cols());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const double t = static_cast<double>(table.at(i, j));
            if (t > 0.0) {
                terms.push_back(t * std::log(t * n / (static_cast<double>(table.row_sum(i)) *
                                                      static_cast<double>(table.col_sum(j)))));
            }
        }
    }
    TestResult r;
    r.statistic = std::max(0.0, 2.0 * sorted_sum(terms));
    r.df = static_cast<std::int64_t>((table.rows() - 1) * (table.cols() - 1));
    r.p_value = chi2_sf(r.statistic, r.df);
    return r;
}

TestResult pearson_test(const ContingencyTable& table) {
    if (table.has_zero_margin()) {
        throw std::invalid_argument("pearson_test: table has an empty row or column");
    }
    const double n = static_cast<double>(table.total());
    std::vector<double> terms;
    terms.reserve(table.rows() * table.cols());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const double e = static_cast<double>(table.row_sum(i)) *
                             static_cast<double>(table.col_sum(j)) / n;
            const double d = static_cast<double>(table.at(i, j)) - e;
            terms.push_back(d * d / e);
        }
    }
    TestResult r;
    r.statistic = sorted_sum(terms);
    r.df = static_cast<std::int64_t>((table.rows() - 1) * (table.cols() - 1));
    r.p_value = chi2_sf(r.statistic, r.df);
    return r;
}

bool applicability(const ContingencyTable& table, double min_expected) {
    const double n = static_cast<double>(table.total());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const double e = static_cast<double>(table.row_sum(i)) *
                             static_cast<double>(table.col_sum(j)) / n;
            if (e < min_expected) return false;
        }
    }
    return true;
}

double mutual_information(const ContingencyTable& table, double log_base) {
    // The identity MI = G^2 / (2N ln base) would hide the zero-margin case;
    // computed directly so product tables with empty margins still give 0.
    const double n = static_cast<double>(table.total());
    std::vector<double> terms;
    terms.reserve(table.rows() * table.cols());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const double t = static_cast<double>(table.at(i, j));
            if (t > 0.0) {
                terms.push_back((t / n) * std::log(t * n /
                                                   (static_cast<double>(table.row_sum(i)) *
                                                    static_cast<double>(table.col_sum(j)))));
            }
        }
    }
    return sorted_sum(terms) / std::log(log_base);
}

double single_cell_mi(const ContingencyTable& table, std::size_t i, std::size_t j,
                      double log_base) {
    if (i >= table.rows() || j >= table.cols()) {
        throw std::invalid_argument("single_cell_mi: cell index out of range");
    }
    const double t = static_cast<double>(table.at(i, j));
    if (t <= 0.0) {
        throw std::invalid_argument("single_cell_mi: undefined for a zero cell");
    }
    const double n = static_cast<double>(table.total());
    return std::log(t * n / (static_cast<double>(table.row_sum(i)) *
                             static_cast<double>(table.col_sum(j)))) / std::log(log_base);
}

double dice(std::int64_t t_ab, std::int64_t t_a, std::int64_t t_b) {
    if (t_a + t_b <= 0) throw std::invalid_argument("dice: zero denominator");
    if (t_ab < 0 || t_a < 0 || t_b < 0) throw std::invalid_argument("dice: negative count");
    return 2.0 * static_cast<double>(t_ab) / static_cast<double>(t_a + t_b);
}

double jaccard(std::int64_t t_ab, std::int64_t t_a_or_b) {
    if (t_a_or_b <= 0) throw std::invalid_argument("jaccard: zero denominator");
    if (t_ab < 0) throw std::invalid_argument("jaccard: negative count");
    return static_cast<double>(t_ab) / static_cast<double>(t_a_or_b);
}

double fisher_exact_2x2(const ContingencyTable& table) {
    if (table.rows() != 2 || table.cols() != 2) {
        throw std::invalid_argument("fisher_exact_2x2: table must be 2x2");
    }
    const std::int64_t r1 = table.row_sum(0);
    const std::int64_t c1 = table.col_sum(0);
    const std::int64_t n = table.total();
    const auto log_point = [&](std::int64_t k) {
        // P(T11 = k | margins) under the hypergeometric
        return log_choose(r1, k) + log_choose(n - r1, c1 - k) - log_choose(n, c1);
    };
    const std::int64_t k_lo = std::max<std::int64_t>(0, r1 + c1 - n);
    const std::int64_t k_hi = std::min(r1, c1);
    const double log_obs = log_point(table.at(0, 0));
    // sum point probabilities <= observed, scaled by the largest term
    double sum = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double lp = log_point(k);
        if (lp <= log_obs + 1e-9) sum += std::exp(lp - log_obs);
    }
    return clamp01(sum * std::exp(log_obs));
}

double binomial_tail(std::int64_t n, double p, std::int64_t k_min) {
    if (n < 0 || k_min < 0 || k_min > n) {
        throw std::invalid_argument("binomial_tail: need 0 <= k_min <= n");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_tail: p outside [0,1]");
    if (k_min == 0) return 1.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    if (k_min <= n * p) {
        // complement is the shorter, smaller-mass side
        double sum = 0.0;
        for (std::int64_t k = k_min - 1; k >= 0; --k) {
            sum += std::exp(log_choose(n, k) + k * log_p + (n - k) * log_q);
        }
        return clamp01(1.0 - sum);
    }
    double sum = 0.0;
    for (std::int64_t k = n; k >= k_min; --k) {
        sum += std::exp(log_choose(n, k) + k * log_p + (n - k) * log_q);
    }
    return clamp01(sum);
}

double normal_tail_approx(std::int64_t n, double p, std::int64_t k_min,
                          bool continuity_correction) {
    if (n < 0 || k_min < 0 || k_min > n) {
        throw std::invalid_argument("normal_tail_approx: need 0 <= k_min <= n");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_tail_approx: p must be in (0,1)");
    }
    const double mean = static_cast<double>(n) * p;
    const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    const double x = static_cast<double>(k_min) - (continuity_correction ? 0.5 : 0.0);
    return normal_sf((x - mean) / sd);
}

double multinomial_log_pmf(std::span<const std::int64_t> counts,
                           std::span<const double> probs) {
    if (counts.size() != probs.size()) {
        throw std::invalid_argument("multinomial_log_pmf: length mismatch");
    }
    double psum = 0.0;
    std::int64_t n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) throw std::invalid_argument("multinomial_log_pmf: negative count");
        if (probs[i] < 0.0) throw std::invalid_argument("multinomial_log_pmf: negative probability");
        psum += probs[i];
        n += counts[i];
    }
    if (std::fabs(psum - 1.0) > 1e-12) {
        throw std::invalid_argument("multinomial_log_pmf: probabilities must sum to 1");
    }
    double lp = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;      // 0 * log anything contributes nothing
        if (probs[i] == 0.0) return -kInf;
        lp += counts[i] * std::log(probs[i]) - std::lgamma(static_cast<double>(counts[i]) + 1.0);
    }
    return lp;
}

TestResult llr_normal_two_sample(const SampleVector& a, const SampleVector& b) {
    if (a.values.size() < 2 || b.values.size() < 2) {
        throw std::invalid_argument("llr_normal_two_sample: need at least 2 samples per group");
    }
    for (double v : a.values)
        if (!std::isfinite(v)) throw std::invalid_argument("llr_normal_two_sample: non-finite value");
    for (double v : b.values)
        if (!std::isfinite(v)) throw std::invalid_argument("llr_normal_two_sample: non-finite value");

    const double na = static_cast<double>(a.values.size());
    const double nb = static_cast<double>(b.values.size());
    const double n = na + nb;
    double sa = 0.0, sb = 0.0;
    for (double v : a.values) sa += v;
    for (double v : b.values) sb += v;
    const double ma = sa / na, mb = sb / nb, mp = (sa + sb) / n;

    double rss1 = 0.0, rss0 = 0.0;
    for (double v : a.values) {
        rss1 += (v - ma) * (v - ma);
        rss0 += (v - mp) * (v - mp);
    }
    for (double v : b.values) {
        rss1 += (v - mb) * (v - mb);
        rss0 += (v - mp) * (v - mp);
    }
    if (rss1 <= 0.0) {
        throw std::invalid_argument("llr_normal_two_sample: zero variance under the alternative");
    }
    TestResult r;
    r.statistic = std::max(0.0, n * std::log(rss0 / rss1));
    r.df = 1;
    r.p_value = chi2_sf(r.statistic, 1);
    return r;
}

std::vector<CalibrationPoint> g2_calibration(double p, std::int64_t n1, std::int64_t n2,
                                             std::span<const double> thresholds) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("g2_calibration: p must be in (0,1)");
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("g2_calibration: sample sizes must be >= 1");
    const double outcomes = (static_cast<double>(n1) + 1.0) * (static_cast<double>(n2) + 1.0);
    if (outcomes > 1e7) {
        throw std::invalid_argument("g2_calibration: enumeration infeasible for these sizes");
    }

    std::vector<double> grid(thresholds.begin(), thresholds.end());
    if (grid.empty()) {
        for (int t = 0; t <= 30; ++t) grid.push_back(static_cast<double>(t));
    }

    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    std::vector<double> pmf1(n1 + 1), pmf2(n2 + 1);
    for (std::int64_t k = 0; k <= n1; ++k) {
        pmf1[k] = std::exp(log_choose(n1, k) + k * log_p + (n1 - k) * log_q);
    }
    for (std::int64_t k = 0; k <= n2; ++k) {
        pmf2[k] = std::exp(log_choose(n2, k) + k * log_p + (n2 - k) * log_q);
    }

    std::vector<std::pair<double, double>> mass;  // (g2, probability)
    mass.reserve(static_cast<std::size_t>(outcomes));
    for (std::int64_t k1 = 0; k1 <= n1; ++k1) {
        for (std::int64_t k2 = 0; k2 <= n2; ++k2) {
            const double pr = pmf1[k1] * pmf2[k2];
            if (pr == 0.0) continue;
            mass.emplace_back(g2_stat_2x2(static_cast<double>(k1), static_cast<double>(n1 - k1),
                                          static_cast<double>(k2), static_cast<double>(n2 - k2)),
                              pr);
        }
    }
    std::sort(mass.begin(), mass.end());
    // suffix sums give exact tail probabilities
    std::vector<double> suffix(mass.size() + 1, 0.0);
    for (std::size_t i = mass.size(); i-- > 0;) {
        suffix[i] = suffix[i + 1] + mass[i].second;
    }

    std::vector<CalibrationPoint> out;
    out.reserve(grid.size());
    for (double t : grid) {
        const auto it = std::lower_bound(mass.begin(), mass.end(),
                                         std::make_pair(t, -1.0));
        CalibrationPoint cp;
        cp.threshold = t;
        cp.empirical_tail = suffix[static_cast<std::size_t>(it - mass.begin())];
        cp.chi2_tail = t <= 0.0 ? 1.0 : chi2_sf(t, 1);
        out.push_back(cp);
    }
    return out;
}

}  // namespace surprise
