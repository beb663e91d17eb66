#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace surprise {

struct TokenStream {
    std::vector<std::string> tokens;
    std::map<std::string, std::int64_t> vocabulary;   // per-token counts
    std::int64_t size() const { return static_cast<std::int64_t>(tokens.size()); }
};

struct TokenizerOptions {
    bool lowercase = true;
    // a token is a maximal run of alphanumerics (plus bytes >= 0x80) allowing
    // internal apostrophes/hyphens/periods, so "u.s.-made", "israel's" and
    // "1981" survive intact
    bool line_delimited = false;   // adjacency does not cross line breaks
};

TokenStream tokenize(std::string_view text, const TokenizerOptions& options = {});

struct ScoredBigram {
    std::string a, b;
    std::int64_t t_ab = 0;      // adjacent occurrences of "a b"
    std::int64_t t_a_nb = 0;    // first = a, second != b
    std::int64_t t_na_b = 0;    // first != a, second = b
    std::int64_t t_na_nb = 0;   // neither
    double g2 = 0.0;
    double pearson = 0.0;
    bool applicable = false;    // every expected count >= 5
};

// One 2x2 table per distinct adjacent pair over the n-1 adjacency slots.
std::vector<ScoredBigram> bigram_tables(const TokenStream& stream);

enum class RankMethod { g2, pearson };

// Scored and sorted descending by the chosen statistic; ties broken by
// (T(AB) desc, A asc, B asc) so output is reproducible byte for byte.
std::vector<ScoredBigram> rank_bigrams(const TokenStream& stream, RankMethod method,
                                       std::size_t top = 0);

// Frequency-of-frequencies profile: (count f, number of distinct words seen
// exactly f times), f ascending.
std::vector<std::pair<std::int64_t, std::int64_t>> zipf_profile(const TokenStream& stream);

}  // namespace surprise
