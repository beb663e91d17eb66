#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surprise/ngram.hpp"

namespace surprise {

// Collapses every whitespace run to a single space; the only text
// normalization applied by default.
std::string collapse_whitespace(std::string_view text);
std::string fold_case(std::string_view text);

struct CategoryModel {
    std::string label;
    NgramCounts counts;
    std::int64_t training_size = 0;
};

struct Classification {
    std::string label;
    std::vector<std::pair<std::string, double>> scores;  // per category, label-sorted
};

/// Multi-category source identifier: the label whose training counts are most
/// compatible with the test string (lowest compat_score) wins.
class Classifier {
public:
    Classifier(std::vector<CategoryModel> categories, int order, double alpha,
               std::optional<std::string> default_label = std::nullopt);

    const std::vector<CategoryModel>& categories() const { return categories_; }
    int order() const { return order_; }
    double alpha() const { return alpha_; }
    const Alphabet& alphabet() const { return categories_.front().counts.alphabet(); }

    Classification classify(std::span<const Symbol> test) const;
    Classification classify_text(std::string_view text) const;

    // Scores mapped to probabilities via exp(-s / 2L) and normalized, L the
    // test length; a convention (the tempering keeps long strings finite),
    // with the raw scores always available from classify().
    std::vector<std::pair<std::string, double>> soft_classify(std::span<const Symbol> test) const;

private:
    std::vector<CategoryModel> categories_;
    int order_;
    double alpha_;
    std::string default_label_;
};

// One classifier from labeled training corpora.  Duplicate labels and empty
// corpora are errors.
Classifier train(const std::vector<std::pair<std::string, std::string>>& corpora,
                 int order, double alpha, const Alphabet& alphabet = Alphabet::bytes(),
                 bool collapse_ws = true);

struct CrossEntropyResult {
    double bits = 0.0;                      // +inf when any true-label q is 0
    std::vector<std::string> zero_cases;    // offending test ids
};

// d-hat: sum over categories of the mean -log2 q(true label), q from
// soft_classify.  The paper's estimator sums, not averages, across categories.
CrossEntropyResult cross_entropy(
    const Classifier& classifier,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& labeled_tests);

struct SuiteText {
    std::int64_t size = 0;      // requested size in bytes
    std::int64_t offset = 0;    // start in the collapsed corpus
    std::string text;
};

struct EvalSuite {
    std::uint64_t seed = 0;
    std::vector<std::int64_t> train_sizes;
    std::vector<std::int64_t> test_sizes;
    // label -> texts; train_texts[i] covers train_sizes[i/10] etc.
    std::map<std::string, std::vector<SuiteText>> train_texts;
    std::map<std::string, std::vector<SuiteText>> test_texts;
    int per_train_size = 10;
    int per_test_size = 100;
};

struct SuiteConfig {
    std::vector<std::int64_t> train_sizes = {1000, 2000, 5000, 10000, 20000, 50000};
    std::vector<std::int64_t> test_sizes = {10, 20, 50, 100, 200, 500};
    int per_train_size = 10;
    int per_test_size = 100;
};

// Samples training/test regions with uniformly distributed starting points
// from each whitespace-collapsed corpus.  Overlap between training and test
// regions is permitted; offsets are recorded so either analysis is possible.
// Byte-identical given the same seed.
EvalSuite make_eval_suite(const std::map<std::string, std::string>& corpus_per_label,
                          const SuiteConfig& config, std::uint64_t seed);

std::string eval_suite_to_json(const EvalSuite& suite);
EvalSuite eval_suite_from_json(const std::string& json_text);

struct EvalCell {
    std::int64_t train_size = 0;
    std::int64_t test_size = 0;
    int order = 0;
    double err_median = 0.0;
    double err_best = 0.0;
    double err_worst = 0.0;
    double cross_entropy_bits = 0.0;   // median across training replicates
    double band_low = 0.0;             // bootstrap band over replicate errors
    double band_high = 0.0;
};

struct EvalReport {
    std::vector<EvalCell> cells;
};

// Error rates over the whole (order, train size, test size) grid; the median
// across the training replicates limits the damage from idiosyncratic
// training texts.
EvalReport evaluate(const EvalSuite& suite, std::span<const int> orders, double alpha,
                    std::uint64_t seed);

struct Band {
    double low = 0.0;
    double high = 0.0;
};

// Percentile bootstrap band (default 2.5/97.5) for the mean of `values`.
Band bootstrap_band(std::span<const double> values, int replicates, std::uint64_t seed,
                    double low_pct = 2.5, double high_pct = 97.5);

// Generic form: statistic over a resampled index multiset of [0, n).
Band bootstrap_band_stat(std::size_t n, int replicates, std::uint64_t seed,
                         const std::function<double(std::span<const std::size_t>)>& statistic,
                         double low_pct = 2.5, double high_pct = 97.5);

}  // namespace surprise
