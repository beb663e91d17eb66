#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "surprise/tables.hpp"

namespace surprise {

using Symbol = std::uint16_t;

/// Symbol space for n-gram counting: raw octets (size 256) or a closed token
/// vocabulary with an unknown-word sentinel.  The pad symbol phi used for
/// initial-context padding is reserved outside the alphabet proper.
class Alphabet {
public:
    enum class Mode { bytes, tokens };

    static Alphabet bytes();
    // vocabulary must be non-empty and duplicate-free; the unknown sentinel
    // is appended as its own symbol if not already present.
    static Alphabet tokens(std::vector<std::string> vocabulary,
                           std::string unknown = "<unk>");

    Mode mode() const { return mode_; }
    std::size_t size() const { return size_; }              // |Sigma|, pad excluded
    Symbol pad() const { return static_cast<Symbol>(size_); }

    std::vector<Symbol> encode(std::string_view text) const;
    std::string symbol_name(Symbol s) const;
    const std::vector<std::string>& vocabulary() const { return vocab_; }
    std::string unknown_token() const { return unknown_; }

    bool operator==(const Alphabet& other) const;

private:
    Mode mode_ = Mode::bytes;
    std::size_t size_ = 256;
    std::vector<std::string> vocab_;                         // token mode only
    std::unordered_map<std::string, Symbol> index_;
    std::string unknown_;
};

// Tuples are keyed by their symbols encoded big-endian, two bytes each, so
// map iteration order equals lexicographic tuple order.
std::string encode_tuple(std::span<const Symbol> tuple);
std::vector<Symbol> decode_tuple(std::string_view key);

/// Tuple counts T(tuple, S) for every length 1..k+1 over a phi-padded
/// sequence, plus context counts (the number of positions whose immediate
/// history equals a given tuple) for lengths 0..k.  Tuples of each length are
/// counted ending at each sequence position, with phi filling positions
/// before the start; phi never appears after the beginning.
///
/// Sharded counting: count disjoint [begin, end) slices of one sequence with
/// count_range and combine with merge(); the result is identical to
/// single-pass counting.
class NgramCounts {
public:
    NgramCounts(const Alphabet& alphabet, int order);

    static NgramCounts count(const Alphabet& alphabet, std::span<const Symbol> seq, int order);
    static NgramCounts count_range(const Alphabet& alphabet, std::span<const Symbol> seq,
                                   int order, std::size_t begin, std::size_t end);

    void merge(const NgramCounts& other);

    int order() const { return order_; }
    const Alphabet& alphabet() const { return alphabet_; }
    std::int64_t source_length() const { return source_length_; }

    // T(tuple): tuple length must be in 1..k+1
    std::int64_t gram_count(std::span<const Symbol> tuple) const;
    // number of positions whose immediate history of length |ctx| equals ctx;
    // ctx length must be in 0..k.  Equals sum_sigma T(ctx sigma) exactly.
    std::int64_t context_count(std::span<const Symbol> ctx) const;
    // T(*^len) = source length, for any len in 1..k+1
    std::int64_t total(int len) const;

    const std::map<std::string, std::int64_t>& grams(int len) const;
    const std::map<std::string, std::int64_t>& contexts(int len) const;

    bool empty() const { return source_length_ == 0; }

    // model-loader hooks; counts restored this way must come from
    // ngram_counts_to_json output
    void restore_grams(int len, std::map<std::string, std::int64_t> m);
    void restore_contexts(int len, std::map<std::string, std::int64_t> m);
    void restore_length(std::int64_t n) { source_length_ = n; }

private:
    Alphabet alphabet_;
    int order_;
    std::int64_t source_length_ = 0;
    // index [len-1] for gram lengths 1..k+1; [len] for context lengths 0..k
    std::vector<std::map<std::string, std::int64_t>> grams_;
    std::vector<std::map<std::string, std::int64_t>> contexts_;
};

// Maximum-likelihood conditional T(ctx.sym) / T(ctx).  Unseen contexts are an
// error, not zero, so silent brittleness cannot pass unnoticed.
double mle_conditional(const NgramCounts& counts, std::span<const Symbol> context,
                       Symbol symbol);

struct DirichletPrior {
    double alpha = 1.0;
    double m = 0.0;        // prior mean for the symbol in question; sums to 1 over Sigma
};

// Uniform prior: (T + 1) / (T(ctx) + |Sigma|); Dirichlet(alpha, m):
// (T + alpha m) / (T(ctx) + alpha |Sigma|).  Well-defined for unseen contexts.
double bayes_conditional(const NgramCounts& counts, std::span<const Symbol> context,
                         Symbol symbol, std::optional<DirichletPrior> prior = std::nullopt);

struct LogEstimate {
    double exact = 0.0;          // psi(T+2) - psi(T(ctx) + |Sigma| + 1)
    double approximate = 0.0;    // log((T+1) / (T(ctx) + |Sigma|))
};

// Posterior expectation of log p under the uniform prior, with the
// log-of-estimator approximation alongside for comparison.
LogEstimate bayes_log_conditional(const NgramCounts& counts, std::span<const Symbol> context,
                                  Symbol symbol);

struct MarkovG2Part {
    std::vector<Symbol> context;
    double g2 = 0.0;
    std::int64_t df = 0;   // (rows-1)(cols-1) over the observed sub-table
};

struct MarkovG2Result {
    TestResult result;                    // df as the source derivation states it
    std::vector<MarkovG2Part> parts;      // per-context contributions
    std::int64_t effective_df = 0;        // summed over observed contexts only
};

// Same-source test for two strings under order-k Markov models: the sum over
// k-long contexts of the 2 x |observed successors| G^2 comparing successor
// counts in the two samples.  Symmetric in its arguments.
MarkovG2Result markov_g2(const NgramCounts& counts1, const NgramCounts& counts2, int k);

// Compatibility score of a test string against a much larger training string
// (low = compatible).  alpha down-weights the test-side counts in the
// composite model; default 0.2.  The collapsed form combines Markov orders
// 1..k by replacing context counts with totals and is the classifier default;
// collapsed = false gives the single-order form with k-gram prefix counts.
double compat_score(const NgramCounts& test, const NgramCounts& train, int k,
                    double alpha = 0.2, bool collapsed = true);

// Alternative score from a uniform-Dirichlet Bayesian estimator (high = more
// likely); kept for experimental comparison.  The normalization constant that
// depends only on the test string is taken as 1: it cannot change rankings.
double bayes_score(const NgramCounts& test, const NgramCounts& train, int k,
                   double alpha = 1.0);

// Versioned JSON model serialization with deterministic key order.
std::string ngram_counts_to_json(const NgramCounts& counts, const std::string& label = "");
struct LabeledCounts {
    std::string label;
    NgramCounts counts;
};
LabeledCounts ngram_counts_from_json(const std::string& json_text);

}  // namespace surprise
