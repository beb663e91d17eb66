#include "surprise/colloc.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "surprise/tables.hpp"

namespace surprise {

namespace {

bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

bool is_joiner(unsigned char c) {
    return c == '\'' || c == '-' || c == '.';
}

}  // namespace

TokenStream tokenize(std::string_view text, const TokenizerOptions& options) {
    TokenStream out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    std::string token;
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (options.line_delimited && c == '\n') {
            out.tokens.emplace_back("\n");   // sentinel; skipped by bigram_tables
            ++i;
            continue;
        }
        if (!is_word_char(c)) {
            ++i;
            continue;
        }
        // token runs over word chars and joiners, but must end on a word char
        std::size_t j = i;
        std::size_t last_word = i;
        while (j < n) {
            const unsigned char d = static_cast<unsigned char>(text[j]);
            if (is_word_char(d)) {
                last_word = j;
                ++j;
            } else if (is_joiner(d)) {
                ++j;
            } else {
                break;
            }
        }
        token.assign(text.substr(i, last_word - i + 1));
        if (options.lowercase) {
            for (char& ch : token) {
                ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            }
        }
        out.tokens.push_back(token);
        i = last_word + 1;
    }
    for (const auto& t : out.tokens) {
        if (t != "\n") ++out.vocabulary[t];
    }
    return out;
}

std::vector<ScoredBigram> bigram_tables(const TokenStream& stream) {
    // adjacency slots, optionally broken at the newline sentinel
    std::map<std::pair<std::string, std::string>, std::int64_t> pair_counts;
    std::map<std::string, std::int64_t> first_counts, second_counts;
    std::int64_t n_pairs = 0;
    for (std::size_t i = 0; i + 1 < stream.tokens.size(); ++i) {
        const auto& a = stream.tokens[i];
        const auto& b = stream.tokens[i + 1];
        if (a == "\n" || b == "\n") continue;
        ++pair_counts[{a, b}];
        ++first_counts[a];
        ++second_counts[b];
        ++n_pairs;
    }

    std::vector<ScoredBigram> out;
    out.reserve(pair_counts.size());
    for (const auto& [ab, t_ab] : pair_counts) {
        ScoredBigram sb;
        sb.a = ab.first;
        sb.b = ab.second;
        sb.t_ab = t_ab;
        sb.t_a_nb = first_counts[ab.first] - t_ab;
        sb.t_na_b = second_counts[ab.second] - t_ab;
        sb.t_na_nb = n_pairs - t_ab - sb.t_a_nb - sb.t_na_b;
        out.push_back(std::move(sb));
    }
    return out;
}

std::vector<ScoredBigram> rank_bigrams(const TokenStream& stream, RankMethod method,
                                       std::size_t top) {
    std::vector<ScoredBigram> bigrams = bigram_tables(stream);
    for (auto& sb : bigrams) {
        const ContingencyTable t =
            ContingencyTable::from_2x2(sb.t_ab, sb.t_na_b, sb.t_a_nb, sb.t_na_nb);
        if (t.has_zero_margin()) {
            // a pair covering an entire margin (tiny corpora only) carries no
            // independence evidence
            sb.g2 = 0.0;
            sb.pearson = 0.0;
            sb.applicable = false;
            continue;
        }
        sb.g2 = g2_test(t).statistic;
        sb.pearson = pearson_test(t).statistic;
        sb.applicable = applicability(t);
    }
    std::sort(bigrams.begin(), bigrams.end(),
              [method](const ScoredBigram& x, const ScoredBigram& y) {
                  const double sx = method == RankMethod::g2 ? x.g2 : x.pearson;
                  const double sy = method == RankMethod::g2 ? y.g2 : y.pearson;
                  if (sx != sy) return sx > sy;
                  if (x.t_ab != y.t_ab) return x.t_ab > y.t_ab;
                  if (x.a != y.a) return x.a < y.a;
                  return x.b < y.b;
              });
    if (top > 0 && bigrams.size() > top) bigrams.resize(top);
    return bigrams;
}

std::vector<std::pair<std::int64_t, std::int64_t>> zipf_profile(const TokenStream& stream) {
    std::map<std::int64_t, std::int64_t> freq_of_freq;
    for (const auto& [word, count] : stream.vocabulary) ++freq_of_freq[count];
    return {freq_of_freq.begin(), freq_of_freq.end()};
}

}  // namespace surprise
