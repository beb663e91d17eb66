#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "surprise/route.hpp"
#include "surprise/rng.hpp"
#include "surprise/special.hpp"

using namespace surprise;

namespace {

// background documents drawn from a shared vocabulary
std::string background_doc(Rng& rng, int words, int vocab) {
    std::string s;
    for (int i = 0; i < words; ++i) {
        s += "bg" + std::to_string(rng.bounded(vocab));
        s += ' ';
    }
    return s;
}

}  // namespace

TEST_CASE("threshold 20 sits at the advertised significance") {
    const double p = chi2_sf(20.0, 1);
    CHECK(p > 7.0e-6);
    CHECK(p < 8.0e-6);
}

TEST_CASE("select_terms requires judged negatives") {
    const LabeledCorpus empty_neg = LabeledCorpus::from_documents({"some words"}, {});
    CHECK_THROWS_AS(select_terms(empty_neg), std::invalid_argument);
}

TEST_CASE("equal relative frequency is never selected") {
    // identical documents on both sides: every g2 is 0 and direction fails
    const LabeledCorpus c =
        LabeledCorpus::from_documents({"alpha beta gamma"}, {"alpha beta gamma"});
    const auto q = select_terms(c, 0.0);
    CHECK(q.terms.empty());
}

TEST_CASE("terms absent from the relevant side are never candidates") {
    const LabeledCorpus c =
        LabeledCorpus::from_documents({"alpha alpha beta"}, {"gamma gamma gamma delta"});
    for (const auto& t : select_terms(c, 0.0).terms) {
        CHECK(t.term != "gamma");
        CHECK(t.term != "delta");
    }
}

TEST_CASE("planted term selected, distractors rejected") {
    Rng rng(19);
    std::vector<std::string> rel, nonrel;
    for (int d = 0; d < 20; ++d) {
        std::string doc = background_doc(rng, 100, 200);
        for (int i = 0; i < 5; ++i) doc += "iraq ";
        rel.push_back(doc);
    }
    for (int d = 0; d < 100; ++d) nonrel.push_back(background_doc(rng, 100, 200));
    const auto q = select_terms(LabeledCorpus::from_documents(rel, nonrel), 20.0);
    REQUIRE(!q.terms.empty());
    CHECK(q.terms.front().term == "iraq");
    // expected false positives: vocab x chi2_sf(20,1) < 1; usually none
    CHECK(q.terms.size() <= 3);
    for (const auto& t : q.terms) {
        CHECK(t.g2 >= 20.0);
    }
}

TEST_CASE("selection invariants under duplication") {
    Rng rng(23);
    std::vector<std::string> rel{background_doc(rng, 80, 50) + " signal signal signal"};
    std::vector<std::string> nonrel{background_doc(rng, 80, 50)};
    const auto base_corpus = LabeledCorpus::from_documents(rel, nonrel);
    const auto base = select_terms(base_corpus, 0.0);

    // duplicate every document 3x on both sides: g2 scales by exactly 3
    std::vector<std::string> rel3, nonrel3;
    for (int i = 0; i < 3; ++i) {
        rel3.insert(rel3.end(), rel.begin(), rel.end());
        nonrel3.insert(nonrel3.end(), nonrel.begin(), nonrel.end());
    }
    const auto scaled = select_terms(LabeledCorpus::from_documents(rel3, nonrel3), 0.0);
    REQUIRE(scaled.terms.size() == base.terms.size());
    for (std::size_t i = 0; i < base.terms.size(); ++i) {
        CHECK(scaled.terms[i].term == base.terms[i].term);
        CHECK(scaled.terms[i].g2 == doctest::Approx(3.0 * base.terms[i].g2).epsilon(1e-9));
    }
}

TEST_CASE("no selected term is over-represented in the negatives") {
    Rng rng(29);
    std::vector<std::string> rel, nonrel;
    for (int d = 0; d < 10; ++d) rel.push_back(background_doc(rng, 60, 40));
    for (int d = 0; d < 10; ++d) nonrel.push_back(background_doc(rng, 60, 40));
    const auto c = LabeledCorpus::from_documents(rel, nonrel);
    for (const auto& t : select_terms(c, 0.0).terms) {
        const double rel_rate = static_cast<double>(t.t_rel) /
                                static_cast<double>(c.relevant_total);
        const double non_rate = static_cast<double>(t.t_nonrel) /
                                static_cast<double>(c.nonrelevant_total);
        CHECK(rel_rate > non_rate);
    }
}

TEST_CASE("key terms of a corpus against itself are empty") {
    const std::vector<std::string> docs{"likelihood ratios everywhere in this text"};
    CHECK(key_terms(docs, docs, 0.0).terms.empty());
}

TEST_CASE("document-count mode and the stemming hook") {
    const std::vector<std::string> rel{"run running runs", "walk walk"};
    const std::vector<std::string> nonrel{"sit sat"};
    const auto binarized = LabeledCorpus::from_documents(rel, nonrel, true);
    CHECK(binarized.relevant_counts.at("run") == 1);    // one document contains it
    CHECK(binarized.relevant_counts.at("walk") == 1);

    // crude suffix stripper as the stemming hook
    const TermTransform stem = [](const std::string& t) {
        for (const char* suffix : {"ning", "ing", "s"}) {
            const std::string sfx(suffix);
            if (t.size() > sfx.size() + 2 && t.ends_with(sfx)) {
                return t.substr(0, t.size() - sfx.size());
            }
        }
        return t;
    };
    const auto stemmed = LabeledCorpus::from_documents(rel, nonrel, false, stem);
    CHECK(stemmed.relevant_counts.at("run") == 3);      // run + running + runs
    CHECK(stemmed.relevant_counts.count("running") == 0);
}

TEST_CASE("key terms find over-represented technical vocabulary") {
    Rng rng(31);
    std::string target, reference;
    for (int i = 0; i < 200; ++i) {
        target += "likelihood markov statistic common word filler ";
        reference += "common word filler news report market ";
    }
    const auto q = key_terms({target}, {reference}, 20.0);
    bool saw_likelihood = false, saw_markov = false;
    for (const auto& t : q.terms) {
        if (t.term == "likelihood") saw_likelihood = true;
        if (t.term == "markov") saw_markov = true;
        CHECK(t.term != "common");
        CHECK(t.term != "filler");
    }
    CHECK(saw_likelihood);
    CHECK(saw_markov);
}

TEST_CASE("document ranking prefers query-bearing documents") {
    RoutingQuery q;
    q.terms.push_back(ScoredTerm{"iraq", 30.0, 5, 0});
    q.terms.push_back(ScoredTerm{"weapons", 25.0, 4, 0});

    std::vector<Document> docs;
    docs.push_back(Document{"d1", tokenize("iraq weapons inspection iraq")});
    docs.push_back(Document{"d2", tokenize("entirely unrelated content here")});
    docs.push_back(Document{"d3", tokenize("weapons of some sort")});
    const auto stats = CorpusStats::from_documents(docs);
    const auto ranked = rank_documents(q, docs, stats);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked.front().id == "d1");
    CHECK(ranked.back().id == "d2");
    CHECK(ranked.back().score == doctest::Approx(0.0));

    // duplicate documents tie exactly, broken by id
    docs.push_back(Document{"d0", tokenize("iraq weapons inspection iraq")});
    const auto stats2 = CorpusStats::from_documents(docs);
    const auto r2 = rank_documents(q, docs, stats2);
    CHECK(r2[0].score == doctest::Approx(r2[1].score));
    CHECK(r2[0].id == "d0");
    CHECK(r2[1].id == "d1");

    RoutingQuery empty;
    CHECK_THROWS_AS(rank_documents(empty, docs, stats2), std::invalid_argument);
}

TEST_CASE("held-out relevant documents rank highly in the planted corpus") {
    Rng rng(37);
    // train on 20 relevant + 100 non-relevant, rank 5 held-out relevant
    // against 100 fresh background documents
    std::vector<std::string> rel, nonrel;
    for (int d = 0; d < 20; ++d) {
        rel.push_back(background_doc(rng, 100, 200) + " iraq iraq iraq iraq iraq");
    }
    for (int d = 0; d < 100; ++d) nonrel.push_back(background_doc(rng, 100, 200));
    const auto query = select_terms(LabeledCorpus::from_documents(rel, nonrel), 20.0);

    std::vector<Document> pool;
    for (int d = 0; d < 100; ++d) {
        pool.push_back(Document{"bg" + std::to_string(d),
                                tokenize(background_doc(rng, 100, 200))});
    }
    for (int d = 0; d < 5; ++d) {
        pool.push_back(Document{"rel" + std::to_string(d),
                                tokenize(background_doc(rng, 100, 200) +
                                         " iraq iraq iraq iraq iraq")});
    }
    const auto ranked = rank_documents(query, pool, CorpusStats::from_documents(pool));
    int rel_in_top10 = 0;
    for (int i = 0; i < 10; ++i) {
        if (ranked[i].id.rfind("rel", 0) == 0) ++rel_in_top10;
    }
    CHECK(rel_in_top10 == 5);
}
