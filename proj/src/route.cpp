#include "surprise/route.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "surprise/tables.hpp"

namespace surprise {

LabeledCorpus LabeledCorpus::from_documents(const std::vector<std::string>& relevant,
                                            const std::vector<std::string>& nonrelevant,
                                            bool count_documents,
                                            const TermTransform& stem) {
    LabeledCorpus c;
    const auto add = [&](const std::string& doc, std::map<std::string, std::int64_t>& counts,
                         std::int64_t& total) {
        const TokenStream ts = tokenize(doc);
        if (count_documents) {
            std::set<std::string> seen;
            for (const auto& [term, n] : ts.vocabulary) seen.insert(stem ? stem(term) : term);
            for (const auto& term : seen) ++counts[term];
            total += static_cast<std::int64_t>(seen.size());
        } else {
            for (const auto& [term, n] : ts.vocabulary) counts[stem ? stem(term) : term] += n;
            total += ts.size();
        }
    };
    for (const auto& d : relevant) add(d, c.relevant_counts, c.relevant_total);
    for (const auto& d : nonrelevant) add(d, c.nonrelevant_counts, c.nonrelevant_total);
    return c;
}

RoutingQuery select_terms(const LabeledCorpus& corpus, double threshold) {
    if (corpus.relevant_total == 0 || corpus.nonrelevant_total == 0) {
        throw std::invalid_argument(
            "select_terms: both judged sides must be nonempty (the method needs negatives)");
    }
    RoutingQuery query;
    query.threshold = threshold;
    // candidate set: every term seen in any relevant document
    for (const auto& [term, t_rel] : corpus.relevant_counts) {
        const auto it = corpus.nonrelevant_counts.find(term);
        const std::int64_t t_non = it == corpus.nonrelevant_counts.end() ? 0 : it->second;
        const double rel_rate = static_cast<double>(t_rel) /
                                static_cast<double>(corpus.relevant_total);
        const double non_rate = static_cast<double>(t_non) /
                                static_cast<double>(corpus.nonrelevant_total);
        if (!(rel_rate > non_rate)) continue;   // direction filter
        const ContingencyTable t = ContingencyTable::from_2x2(
            t_rel, corpus.relevant_total - t_rel, t_non, corpus.nonrelevant_total - t_non);
        const double g2 = t.has_zero_margin() ? 0.0 : g2_test(t).statistic;
        if (g2 >= threshold) {
            query.terms.push_back(ScoredTerm{term, g2, t_rel, t_non});
        }
    }
    std::sort(query.terms.begin(), query.terms.end(),
              [](const ScoredTerm& x, const ScoredTerm& y) {
                  if (x.g2 != y.g2) return x.g2 > y.g2;
                  return x.term < y.term;
              });
    return query;
}

RoutingQuery key_terms(const std::vector<std::string>& target_docs,
                       const std::vector<std::string>& reference_docs,
                       double threshold) {
    return select_terms(LabeledCorpus::from_documents(target_docs, reference_docs), threshold);
}

CorpusStats CorpusStats::from_documents(const std::vector<Document>& docs) {
    CorpusStats s;
    s.n_docs = static_cast<std::int64_t>(docs.size());
    for (const auto& d : docs) {
        for (const auto& [term, n] : d.tokens.vocabulary) ++s.doc_freq[term];
    }
    return s;
}

std::vector<RankedDocument> rank_documents(const RoutingQuery& query,
                                           const std::vector<Document>& documents,
                                           const CorpusStats& stats) {
    if (query.terms.empty()) throw std::invalid_argument("rank_documents: empty query");
    if (stats.n_docs == 0) throw std::invalid_argument("rank_documents: empty corpus stats");

    // query vector: ltc = (1 + ln tf) * idf, cosine-normalized; selected terms
    // enter with tf 1
    std::map<std::string, double> qvec;
    double qnorm = 0.0;
    for (const auto& t : query.terms) {
        const auto it = stats.doc_freq.find(t.term);
        const std::int64_t df = it == stats.doc_freq.end() ? 0 : it->second;
        if (df == 0) continue;    // term absent from the corpus contributes nothing
        const double idf = std::log(static_cast<double>(stats.n_docs) /
                                    static_cast<double>(df));
        if (idf <= 0.0) continue;
        qvec[t.term] = idf;
        qnorm += idf * idf;
    }
    qnorm = qnorm > 0.0 ? std::sqrt(qnorm) : 1.0;

    std::vector<RankedDocument> out;
    out.reserve(documents.size());
    for (const auto& doc : documents) {
        // document vector: lnc = 1 + ln tf, no idf, cosine-normalized
        double dnorm = 0.0;
        for (const auto& [term, tf] : doc.tokens.vocabulary) {
            const double w = 1.0 + std::log(static_cast<double>(tf));
            dnorm += w * w;
        }
        dnorm = dnorm > 0.0 ? std::sqrt(dnorm) : 1.0;
        double dot = 0.0;
        for (const auto& [term, qw] : qvec) {
            const auto it = doc.tokens.vocabulary.find(term);
            if (it == doc.tokens.vocabulary.end()) continue;
            const double dw = 1.0 + std::log(static_cast<double>(it->second));
            dot += qw * dw;
        }
        out.push_back(RankedDocument{doc.id, dot / (qnorm * dnorm)});
    }
    std::sort(out.begin(), out.end(), [](const RankedDocument& x, const RankedDocument& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.id < y.id;
    });
    return out;
}

}  // namespace surprise
