#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "surprise/ngram.hpp"

namespace surprise {

enum class DeltaRows {
    // complementary row is T(cw) - T(sigma c w): rows are disjoint and the
    // statistic is a valid independence G^2 (default)
    disjoint,
    // rows T(cw) and T(sigma c w) as printed in the source derivation; the
    // rows overlap, kept for comparison
    overlapping,
};

// Likelihood gain delta(sigma c) >= 0 from splitting context c on preceding
// symbol sigma, computed from raw tuple counts.  The counts object must carry
// order >= |c| + 1.  Unseen candidate contexts are an error.
double extension_delta(const NgramCounts& counts, std::span<const Symbol> context,
                       Symbol symbol, DeltaRows rows = DeltaRows::disjoint);

struct GrowthStep {
    std::vector<Symbol> context;    // the accepted extension
    double delta = 0.0;
    double log_likelihood = 0.0;    // training LL after the step
};

/// Variable-context Markov model: conditional distributions per context in a
/// suffix-closed set, looked up by longest suffix of the history.  Grown
/// greedily: each round scores every extension sigma c of every existing
/// context by the G^2 gain of splitting c's positions on the preceding
/// symbol, and accepts the best while it exceeds epsilon.  Distributions are
/// the maximum-likelihood estimates over the positions each context resolves,
/// so the training log-likelihood rises by exactly delta/2 per accepted step.
class MixedModel {
public:
    const Alphabet& alphabet() const { return alphabet_; }
    double epsilon() const { return epsilon_; }
    const std::vector<GrowthStep>& trace() const { return trace_; }
    double initial_log_likelihood() const { return initial_ll_; }
    std::size_t context_count() const { return probs_.size(); }
    int max_context_length() const { return max_len_; }

    // longest suffix of `history` that is a model context (possibly empty)
    std::vector<Symbol> resolve(std::span<const Symbol> history) const;
    // p(symbol | resolved context); 0 for events unseen under that context
    double probability(std::span<const Symbol> history, Symbol symbol) const;

    const std::map<std::string, std::map<Symbol, double>>& contexts() const { return probs_; }

    friend MixedModel grow_model(const Alphabet&, std::span<const Symbol>, double);
    friend MixedModel mixed_model_from_json_parts(Alphabet, double,
                                                  std::map<std::string, std::map<Symbol, double>>);

private:
    Alphabet alphabet_ = Alphabet::bytes();
    double epsilon_ = 0.0;
    int max_len_ = 0;
    double initial_ll_ = 0.0;
    std::map<std::string, std::map<Symbol, double>> probs_;   // encoded context -> dist
    std::vector<GrowthStep> trace_;
};

// Default epsilon when the caller passes none: the chi-squared critical value
// at p = 1e-3 with |Sigma|-1 degrees of freedom, a per-step cushion against
// the many tests the greedy loop runs.
double default_grow_epsilon(const Alphabet& alphabet);

MixedModel grow_model(const Alphabet& alphabet, std::span<const Symbol> sequence,
                      double epsilon);

/// Recursive quasi-Bayesian smoothing: the order-m estimate blends observed
/// counts with the order-(m-1) estimate, grounded at order-0 Laplace.
/// Weight per level: alpha |Sigma| (fixed) or e^H of the lower-order context
/// distribution (adaptive; 1 <= w <= |Sigma|).
class QuasiBayesModel {
public:
    QuasiBayesModel(NgramCounts counts, double alpha);        // fixed weight alpha |Sigma|
    explicit QuasiBayesModel(NgramCounts counts);             // adaptive e^H weight

    int order() const { return counts_.order(); }
    const Alphabet& alphabet() const { return counts_.alphabet(); }
    const NgramCounts& counts() const { return counts_; }
    bool adaptive() const { return adaptive_; }
    double alpha() const { return alpha_; }

    // context is clipped to the model order (longest suffix used)
    double probability(std::span<const Symbol> context, Symbol symbol) const;

private:
    double level_probability(std::span<const Symbol> context, Symbol symbol, int m) const;

    NgramCounts counts_;
    double alpha_ = 1.0;
    bool adaptive_ = false;
};

struct PerplexityResult {
    double perplexity = 0.0;                  // +inf if any symbol got probability 0
    std::optional<std::size_t> zero_position; // first offending position
};

PerplexityResult perplexity(const MixedModel& model, std::span<const Symbol> text);
PerplexityResult perplexity(const QuasiBayesModel& model, std::span<const Symbol> text);

// Model files: contexts and per-context distributions, sorted and versioned.
std::string mixed_model_to_json(const MixedModel& model);
MixedModel mixed_model_from_json(const std::string& json_text);
std::string quasi_bayes_to_json(const QuasiBayesModel& model);
QuasiBayesModel quasi_bayes_from_json(const std::string& json_text);

}  // namespace surprise
