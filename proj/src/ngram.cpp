#include "surprise/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "surprise/special.hpp"

namespace surprise {

namespace {

std::string key_suffix(const std::string& key, std::size_t symbols) {
    return key.substr(key.size() - 2 * symbols);
}

}  // namespace

Alphabet Alphabet::bytes() {
    Alphabet a;
    a.mode_ = Mode::bytes;
    a.size_ = 256;
    return a;
}

Alphabet Alphabet::tokens(std::vector<std::string> vocabulary, std::string unknown) {
    if (vocabulary.empty()) throw std::invalid_argument("Alphabet: empty vocabulary");
    Alphabet a;
    a.mode_ = Mode::tokens;
    a.vocab_ = std::move(vocabulary);
    a.unknown_ = std::move(unknown);
    if (std::find(a.vocab_.begin(), a.vocab_.end(), a.unknown_) == a.vocab_.end()) {
        a.vocab_.push_back(a.unknown_);
    }
    if (a.vocab_.size() > 65000) throw std::invalid_argument("Alphabet: vocabulary too large");
    for (std::size_t i = 0; i < a.vocab_.size(); ++i) {
        if (!a.index_.emplace(a.vocab_[i], static_cast<Symbol>(i)).second) {
            throw std::invalid_argument("Alphabet: duplicate vocabulary entry " + a.vocab_[i]);
        }
    }
    a.size_ = a.vocab_.size();
    if (a.size_ < 2) throw std::invalid_argument("Alphabet: need at least 2 symbols");
    return a;
}

std::vector<Symbol> Alphabet::encode(std::string_view text) const {
    std::vector<Symbol> out;
    if (mode_ == Mode::bytes) {
        out.reserve(text.size());
        for (char c : text) out.push_back(static_cast<Symbol>(static_cast<unsigned char>(c)));
        return out;
    }
    const Symbol unk = index_.at(unknown_);
    std::istringstream in{std::string(text)};
    std::string word;
    while (in >> word) {
        const auto it = index_.find(word);
        out.push_back(it == index_.end() ? unk : it->second);
    }
    return out;
}

std::string Alphabet::symbol_name(Symbol s) const {
    if (s == pad()) return "<pad>";
    if (mode_ == Mode::bytes) return std::string(1, static_cast<char>(s));
    return vocab_.at(s);
}

bool Alphabet::operator==(const Alphabet& other) const {
    return mode_ == other.mode_ && size_ == other.size_ && vocab_ == other.vocab_;
}

std::string encode_tuple(std::span<const Symbol> tuple) {
    std::string key;
    key.reserve(tuple.size() * 2);
    for (Symbol s : tuple) {
        key.push_back(static_cast<char>(s >> 8));
        key.push_back(static_cast<char>(s & 0xff));
    }
    return key;
}

std::vector<Symbol> decode_tuple(std::string_view key) {
    if (key.size() % 2 != 0) throw std::invalid_argument("decode_tuple: odd key length");
    std::vector<Symbol> tuple(key.size() / 2);
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        tuple[i] = static_cast<Symbol>((static_cast<unsigned char>(key[2 * i]) << 8) |
                                       static_cast<unsigned char>(key[2 * i + 1]));
    }
    return tuple;
}

NgramCounts::NgramCounts(const Alphabet& alphabet, int order)
    : alphabet_(alphabet), order_(order) {
    if (order < 0) throw std::invalid_argument("NgramCounts: order must be >= 0");
    grams_.resize(order_ + 1);
    contexts_.resize(order_ + 1);
}

NgramCounts NgramCounts::count(const Alphabet& alphabet, std::span<const Symbol> seq,
                               int order) {
    return count_range(alphabet, seq, order, 0, seq.size());
}

NgramCounts NgramCounts::count_range(const Alphabet& alphabet, std::span<const Symbol> seq,
                                     int order, std::size_t begin, std::size_t end) {
    NgramCounts nc(alphabet, order);
    if (begin > end || end > seq.size()) {
        throw std::invalid_argument("NgramCounts: bad slice");
    }
    const Symbol pad = alphabet.pad();
    const int k = order;
    std::vector<Symbol> window(k + 1);
    std::string full;
    for (std::size_t i = begin; i < end; ++i) {
        // window = the k+1 symbols ending at i, phi-filled before the start
        for (int m = 0; m <= k; ++m) {
            const std::int64_t idx = static_cast<std::int64_t>(i) - k + m;
            window[m] = idx < 0 ? pad : seq[static_cast<std::size_t>(idx)];
        }
        full = encode_tuple(window);
        for (int len = 1; len <= k + 1; ++len) {
            ++nc.grams_[len - 1][key_suffix(full, len)];
        }
        // history of length len ends one symbol earlier
        for (int len = 0; len <= k; ++len) {
            ++nc.contexts_[len][full.substr(2 * static_cast<std::size_t>(k - len),
                                            2 * static_cast<std::size_t>(len))];
        }
        ++nc.source_length_;
    }
    return nc;
}

void NgramCounts::merge(const NgramCounts& other) {
    if (order_ != other.order_ || !(alphabet_ == other.alphabet_)) {
        throw std::invalid_argument("NgramCounts::merge: order or alphabet mismatch");
    }
    for (std::size_t m = 0; m < grams_.size(); ++m) {
        for (const auto& [key, n] : other.grams_[m]) grams_[m][key] += n;
        for (const auto& [key, n] : other.contexts_[m]) contexts_[m][key] += n;
    }
    source_length_ += other.source_length_;
}

std::int64_t NgramCounts::gram_count(std::span<const Symbol> tuple) const {
    const int len = static_cast<int>(tuple.size());
    if (len < 1 || len > order_ + 1) {
        throw std::invalid_argument("gram_count: tuple length outside 1..k+1");
    }
    const auto& m = grams_[len - 1];
    const auto it = m.find(encode_tuple(tuple));
    return it == m.end() ? 0 : it->second;
}

std::int64_t NgramCounts::context_count(std::span<const Symbol> ctx) const {
    const int len = static_cast<int>(ctx.size());
    if (len > order_) throw std::invalid_argument("context_count: context longer than order");
    const auto& m = contexts_[len];
    const auto it = m.find(encode_tuple(ctx));
    return it == m.end() ? 0 : it->second;
}

std::int64_t NgramCounts::total(int len) const {
    if (len < 1 || len > order_ + 1) throw std::invalid_argument("total: length outside 1..k+1");
    return source_length_;
}

const std::map<std::string, std::int64_t>& NgramCounts::grams(int len) const {
    if (len < 1 || len > order_ + 1) throw std::invalid_argument("grams: length outside 1..k+1");
    return grams_[len - 1];
}

const std::map<std::string, std::int64_t>& NgramCounts::contexts(int len) const {
    if (len < 0 || len > order_) throw std::invalid_argument("contexts: length outside 0..k");
    return contexts_[len];
}

void NgramCounts::restore_grams(int len, std::map<std::string, std::int64_t> m) {
    if (len < 1 || len > order_ + 1) throw std::invalid_argument("restore_grams: bad length");
    grams_[len - 1] = std::move(m);
}

void NgramCounts::restore_contexts(int len, std::map<std::string, std::int64_t> m) {
    if (len < 0 || len > order_) throw std::invalid_argument("restore_contexts: bad length");
    contexts_[len] = std::move(m);
}

double mle_conditional(const NgramCounts& counts, std::span<const Symbol> context,
                       Symbol symbol) {
    const std::int64_t ctx = counts.context_count(context);
    if (ctx == 0) throw std::invalid_argument("mle_conditional: unseen context");
    std::vector<Symbol> full(context.begin(), context.end());
    full.push_back(symbol);
    return static_cast<double>(counts.gram_count(full)) / static_cast<double>(ctx);
}

double bayes_conditional(const NgramCounts& counts, std::span<const Symbol> context,
                         Symbol symbol, std::optional<DirichletPrior> prior) {
    const double sigma = static_cast<double>(counts.alphabet().size());
    const std::int64_t ctx = counts.context_count(context);
    std::vector<Symbol> full(context.begin(), context.end());
    full.push_back(symbol);
    const std::int64_t t = counts.gram_count(full);
    if (!prior) {
        return (static_cast<double>(t) + 1.0) / (static_cast<double>(ctx) + sigma);
    }
    if (prior->alpha < 0.0) throw std::invalid_argument("bayes_conditional: alpha must be >= 0");
    if (prior->m < 0.0 || prior->m > 1.0) {
        throw std::invalid_argument("bayes_conditional: prior mean outside [0,1]");
    }
    return (static_cast<double>(t) + prior->alpha * prior->m) /
           (static_cast<double>(ctx) + prior->alpha * sigma);
}

LogEstimate bayes_log_conditional(const NgramCounts& counts, std::span<const Symbol> context,
                                  Symbol symbol) {
    const double sigma = static_cast<double>(counts.alphabet().size());
    const std::int64_t ctx = counts.context_count(context);
    std::vector<Symbol> full(context.begin(), context.end());
    full.push_back(symbol);
    const std::int64_t t = counts.gram_count(full);
    LogEstimate e;
    e.exact = digamma(static_cast<double>(t) + 2.0) -
              digamma(static_cast<double>(ctx) + sigma + 1.0);
    e.approximate = std::log((static_cast<double>(t) + 1.0) /
                             (static_cast<double>(ctx) + sigma));
    return e;
}

MarkovG2Result markov_g2(const NgramCounts& counts1, const NgramCounts& counts2, int k) {
    if (k < 0) throw std::invalid_argument("markov_g2: order must be >= 0");
    if (counts1.order() < k || counts2.order() < k) {
        throw std::invalid_argument("markov_g2: counts carry a lower order than requested");
    }
    if (!(counts1.alphabet() == counts2.alphabet())) {
        throw std::invalid_argument("markov_g2: alphabet mismatch");
    }

    // (k+1)-gram keys sort with the k-long context as a prefix, so grams that
    // share a context are contiguous in both maps; merge-join on context.
    struct Row {
        std::map<std::string, std::int64_t>::const_iterator it, end;
    };
    Row a{counts1.grams(k + 1).begin(), counts1.grams(k + 1).end()};
    Row b{counts2.grams(k + 1).begin(), counts2.grams(k + 1).end()};
    const auto ctx_of = [k](const std::string& key) { return key.substr(0, 2 * k); };

    MarkovG2Result out;
    double stat = 0.0;
    while (a.it != a.end || b.it != b.end) {
        std::string ctx;
        if (a.it == a.end) ctx = ctx_of(b.it->first);
        else if (b.it == b.end) ctx = ctx_of(a.it->first);
        else ctx = std::min(ctx_of(a.it->first), ctx_of(b.it->first));

        // collect successor counts for this context from both samples
        std::vector<std::pair<std::int64_t, std::int64_t>> cells;
        std::vector<std::string> keys;
        while (a.it != a.end && ctx_of(a.it->first) == ctx) {
            keys.push_back(a.it->first);
            cells.emplace_back(a.it->second, 0);
            ++a.it;
        }
        std::size_t pos = 0;
        while (b.it != b.end && ctx_of(b.it->first) == ctx) {
            while (pos < keys.size() && keys[pos] < b.it->first) ++pos;
            if (pos < keys.size() && keys[pos] == b.it->first) {
                cells[pos].second = b.it->second;
            } else {
                keys.insert(keys.begin() + pos, b.it->first);
                cells.insert(cells.begin() + pos, {0, b.it->second});
            }
            ++b.it;
        }

        std::int64_t r1 = 0, r2 = 0;
        for (const auto& [x, y] : cells) { r1 += x; r2 += y; }
        const double n = static_cast<double>(r1 + r2);
        // sorted term summation keeps the statistic bit-identical when the
        // two samples swap roles
        std::vector<double> terms;
        terms.reserve(2 * cells.size());
        for (const auto& [x, y] : cells) {
            const double col = static_cast<double>(x + y);
            if (x > 0) terms.push_back(x * std::log(x * n / (static_cast<double>(r1) * col)));
            if (y > 0) terms.push_back(y * std::log(y * n / (static_cast<double>(r2) * col)));
        }
        std::sort(terms.begin(), terms.end());
        double g = 0.0;
        for (double t : terms) g += t;
        g = std::max(0.0, 2.0 * g);
        stat += g;

        MarkovG2Part part;
        part.context = decode_tuple(ctx);
        part.g2 = g;
        part.df = (r1 > 0 && r2 > 0 && cells.size() > 1)
                      ? static_cast<std::int64_t>(cells.size()) - 1
                      : 0;
        out.effective_df += part.df;
        out.parts.push_back(std::move(part));
    }

    const double sigma = static_cast<double>(counts1.alphabet().size());
    double df = sigma - 1.0;
    if (k >= 1) df = (sigma - 1.0) * (std::pow(sigma, k) - 1.0);
    out.result.statistic = stat;
    out.result.df = df > 9.0e18 ? std::int64_t{9000000000000000000}
                                : static_cast<std::int64_t>(df + 0.5);
    out.result.p_value = chi2_sf(stat, out.result.df);
    return out;
}

double compat_score(const NgramCounts& test, const NgramCounts& train, int k,
                    double alpha, bool collapsed) {
    if (alpha <= 0.0) throw std::invalid_argument("compat_score: alpha must be > 0");
    if (test.empty()) throw std::invalid_argument("compat_score: empty test counts");
    if (test.order() < k || train.order() < k) {
        throw std::invalid_argument("compat_score: counts carry a lower order than requested");
    }
    const double n_test = static_cast<double>(test.total(k + 1));
    const double n_train = static_cast<double>(train.total(k + 1));
    double sum = 0.0;
    for (const auto& [key, t_test] : test.grams(k + 1)) {
        const double tt = static_cast<double>(t_test);
        const auto tuple = decode_tuple(key);
        const double tr = static_cast<double>(train.gram_count(tuple));
        double ct = n_test, cr = n_train;
        if (!collapsed) {
            const std::span<const Symbol> prefix(tuple.data(), static_cast<std::size_t>(k));
            ct = static_cast<double>(test.context_count(prefix));
            cr = static_cast<double>(train.context_count(prefix));
        }
        sum += tt * std::log(tt * (alpha * ct + cr) / (ct * (alpha * tt + tr)));
    }
    return 2.0 * sum;
}

double bayes_score(const NgramCounts& test, const NgramCounts& train, int k, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("bayes_score: alpha must be > 0");
    if (test.empty()) throw std::invalid_argument("bayes_score: empty test counts");
    if (test.order() < k || train.order() < k) {
        throw std::invalid_argument("bayes_score: counts carry a lower order than requested");
    }
    const double sigma = static_cast<double>(train.alphabet().size());
    double sum = 0.0;
    for (const auto& [key, t_test] : test.grams(k + 1)) {
        const auto tuple = decode_tuple(key);
        const double tr = static_cast<double>(train.gram_count(tuple));
        const std::span<const Symbol> prefix(tuple.data(), static_cast<std::size_t>(k));
        const double cr = static_cast<double>(train.context_count(prefix));
        sum += static_cast<double>(t_test) * std::log((alpha + tr) / (alpha * sigma + cr));
    }
    return sum;
}

namespace {

nlohmann::json tuple_map_to_json(const std::map<std::string, std::int64_t>& m) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [key, n] : m) {
        std::string readable;
        for (Symbol s : decode_tuple(key)) {
            if (!readable.empty()) readable.push_back(' ');
            readable += std::to_string(s);
        }
        obj[readable] = n;
    }
    return obj;
}

std::map<std::string, std::int64_t> tuple_map_from_json(const nlohmann::json& obj) {
    std::map<std::string, std::int64_t> m;
    for (const auto& [readable, n] : obj.items()) {
        std::vector<Symbol> tuple;
        std::istringstream in(readable);
        long v;
        while (in >> v) tuple.push_back(static_cast<Symbol>(v));
        m[encode_tuple(tuple)] = n.get<std::int64_t>();
    }
    return m;
}

}  // namespace

std::string ngram_counts_to_json(const NgramCounts& counts, const std::string& label) {
    nlohmann::json j;
    j["format_version"] = 1;
    if (!label.empty()) j["label"] = label;
    const bool bytes = counts.alphabet().mode() == Alphabet::Mode::bytes;
    j["mode"] = bytes ? "bytes" : "tokens";
    nlohmann::json alphabet = nlohmann::json::object();
    alphabet["size"] = counts.alphabet().size();
    if (!bytes) {
        alphabet["vocabulary"] = counts.alphabet().vocabulary();
        alphabet["unknown"] = counts.alphabet().unknown_token();
    }
    j["alphabet"] = alphabet;
    j["order"] = counts.order();
    j["source_length"] = counts.source_length();
    nlohmann::json grams = nlohmann::json::object();
    for (int len = 1; len <= counts.order() + 1; ++len) {
        grams[std::to_string(len)] = tuple_map_to_json(counts.grams(len));
    }
    j["grams"] = grams;
    nlohmann::json ctxs = nlohmann::json::object();
    for (int len = 0; len <= counts.order(); ++len) {
        ctxs[std::to_string(len)] = tuple_map_to_json(counts.contexts(len));
    }
    j["contexts"] = ctxs;
    return j.dump(2) + "\n";
}

LabeledCounts ngram_counts_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.at("format_version").get<int>() != 1) {
        throw std::invalid_argument("model load: unsupported format_version");
    }
    Alphabet alphabet = Alphabet::bytes();
    if (j.at("mode").get<std::string>() == "tokens") {
        const auto& a = j.at("alphabet");
        alphabet = Alphabet::tokens(a.at("vocabulary").get<std::vector<std::string>>(),
                                    a.at("unknown").get<std::string>());
    }
    const int order = j.at("order").get<int>();
    NgramCounts counts(alphabet, order);
    for (int len = 1; len <= order + 1; ++len) {
        counts.restore_grams(len, tuple_map_from_json(j.at("grams").at(std::to_string(len))));
    }
    for (int len = 0; len <= order; ++len) {
        counts.restore_contexts(len, tuple_map_from_json(j.at("contexts").at(std::to_string(len))));
    }
    counts.restore_length(j.at("source_length").get<std::int64_t>());
    LabeledCounts lc{j.contains("label") ? j.at("label").get<std::string>() : "",
                     std::move(counts)};
    return lc;
}

}  // namespace surprise
