#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace surprise {

/// An r x c table of non-negative integer co-occurrence counts with cached
/// margins.  Immutable after construction; the input type of every
/// association test in this module.
class ContingencyTable {
public:
    ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::int64_t> cells);

    static ContingencyTable from_2x2(std::int64_t a, std::int64_t b,
                                     std::int64_t c, std::int64_t d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::int64_t at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
    std::int64_t row_sum(std::size_t i) const { return row_sums_[i]; }
    std::int64_t col_sum(std::size_t j) const { return col_sums_[j]; }
    std::int64_t total() const { return total_; }

    bool has_zero_margin() const;
    ContingencyTable transposed() const;

    // Parses rows of whitespace-separated integers, one row per line.
    static ContingencyTable parse_tsv(const std::string& text);

private:
    std::size_t rows_, cols_;
    std::vector<std::int64_t> cells_;
    std::vector<std::int64_t> row_sums_, col_sums_;
    std::int64_t total_;
};

struct TestResult {
    double statistic = 0.0;
    std::int64_t df = 0;
    double p_value = 1.0;
};

// G^2 independence test: 2 sum T_ij ln(T_ij N / (row_i col_j)) with
// 0 ln 0 := 0, df = (rows-1)(cols-1).  Rejects tables with an empty row or
// column (expected counts undefined there, and dropping them would change df).
TestResult g2_test(const ContingencyTable& table);

// Pearson's chi-squared: sum (T_ij - E_ij)^2 / E_ij, E_ij = row_i col_j / N.
TestResult pearson_test(const ContingencyTable& table);

// True iff every expected cell count is >= min_expected (the usual rule of
// thumb for Pearson applicability).
bool applicability(const ContingencyTable& table, double min_expected = 5.0);

// Average mutual information from maximum-likelihood cell/margin estimates.
// In base-e units, g2_test(t).statistic == 2 N mutual_information(t, e).
double mutual_information(const ContingencyTable& table, double log_base);

// log of the association ratio for one cell: log(T_ij N / (row_i col_j)).
// Requires a nonzero cell; may be negative.
double single_cell_mi(const ContingencyTable& table, std::size_t i, std::size_t j,
                      double log_base);

double dice(std::int64_t t_ab, std::int64_t t_a, std::int64_t t_b);
double jaccard(std::int64_t t_ab, std::int64_t t_a_or_b);

// Two-sided Fisher exact test for a 2x2 table: the probability mass of all
// tables with the observed margins whose hypergeometric point probability
// does not exceed the observed one.  Log-space throughout.
double fisher_exact_2x2(const ContingencyTable& table);

// Exact binomial upper tail P(K >= k_min), via the complement for small
// k_min, summed in ascending order of magnitude otherwise.
double binomial_tail(std::int64_t n, double p, std::int64_t k_min);

// Upper tail of Normal(np, np(1-p)) at the same threshold; offered for
// demonstrating how badly the approximation fails at small expected counts,
// not as a regression target.  Continuity correction (k_min - 0.5) on by
// default.
double normal_tail_approx(std::int64_t n, double p, std::int64_t k_min,
                          bool continuity_correction = true);

// log pmf of the multinomial: log n! prod p_s^{k_s} / k_s!.  Zero-probability
// symbols with nonzero counts give -inf.
double multinomial_log_pmf(std::span<const std::int64_t> counts,
                           std::span<const double> probs);

struct SampleVector {
    std::vector<double> values;
};

// -2 log lambda for mean equality of two normal samples with a common
// unknown variance: N ln(RSS0/RSS1), df = 1.
TestResult llr_normal_two_sample(const SampleVector& a, const SampleVector& b);

struct CalibrationPoint {
    double threshold = 0.0;
    double empirical_tail = 0.0;
    double chi2_tail = 0.0;
};

// Exact small-sample calibration of the 2x2 G^2 statistic against chi^2(1):
// enumerates every (k1, k2) outcome of two independent binomials Bin(n1, p),
// Bin(n2, p), and accumulates the exact probability that G^2 >= t for each
// grid threshold.  Default grid: unit steps 0..30.
std::vector<CalibrationPoint> g2_calibration(double p, std::int64_t n1, std::int64_t n2,
                                             std::span<const double> thresholds = {});

}  // namespace surprise
