#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "surprise/colloc.hpp"

namespace surprise {

// optional term normalization applied before counting (e.g. a stemmer);
// identity when empty.  Off by default everywhere.
using TermTransform = std::function<std::string(const std::string&)>;

/// Judged relevant/non-relevant training sides as term-frequency tables.
/// count_documents mode (off by default) binarizes per document; the default
/// counts raw token frequency.
struct LabeledCorpus {
    std::map<std::string, std::int64_t> relevant_counts;      // T(t, R)
    std::map<std::string, std::int64_t> nonrelevant_counts;   // T(t, N)
    std::int64_t relevant_total = 0;                          // T(*, R)
    std::int64_t nonrelevant_total = 0;

    static LabeledCorpus from_documents(const std::vector<std::string>& relevant,
                                        const std::vector<std::string>& nonrelevant,
                                        bool count_documents = false,
                                        const TermTransform& stem = {});
};

struct ScoredTerm {
    std::string term;
    double g2 = 0.0;
    std::int64_t t_rel = 0;
    std::int64_t t_nonrel = 0;
};

struct RoutingQuery {
    std::vector<ScoredTerm> terms;   // g2 descending
    double threshold = 20.0;
};

// Keeps terms from the relevant side whose 2x2 G^2 meets the threshold AND
// whose relative frequency is strictly higher among relevant documents; the
// two-sided statistic alone would also admit terms characteristic of the
// non-relevant side.  Default threshold 20 corresponds to p ~ 1e-5.
RoutingQuery select_terms(const LabeledCorpus& corpus, double threshold = 20.0);

// Same machinery against a reference corpus: terms over-represented in the
// target come out as its key terms.
RoutingQuery key_terms(const std::vector<std::string>& target_docs,
                       const std::vector<std::string>& reference_docs,
                       double threshold = 20.0);

struct Document {
    std::string id;
    TokenStream tokens;
};

struct CorpusStats {
    std::int64_t n_docs = 0;
    std::map<std::string, std::int64_t> doc_freq;

    static CorpusStats from_documents(const std::vector<Document>& docs);
};

struct RankedDocument {
    std::string id;
    double score = 0.0;
};

// lnc.ltc cosine ranking: documents log-tf cosine-normalized (no idf), query
// log-tf x idf cosine-normalized.  The contribution here is the term
// selection; the weighting is the standard scheme.  Ties break by id.
std::vector<RankedDocument> rank_documents(const RoutingQuery& query,
                                           const std::vector<Document>& documents,
                                           const CorpusStats& stats);

}  // namespace surprise
