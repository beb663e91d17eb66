#include "surprise/mixedmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "surprise/special.hpp"

namespace surprise {

namespace {

// G^2 of the 2 x |successors| split table: row 1 = rest, row 2 = part.
// Equal conditional distributions give exactly 0 (each term is one log of an
// integer ratio product).
double split_g2(const std::map<Symbol, std::int64_t>& all,
                const std::map<Symbol, std::int64_t>& part) {
    std::int64_t r2 = 0;
    for (const auto& [w, c] : part) r2 += c;
    std::int64_t r1 = 0;
    for (const auto& [w, c] : all) r1 += c;
    r1 -= r2;
    if (r1 == 0 || r2 == 0) return 0.0;
    const double n = static_cast<double>(r1 + r2);
    double g = 0.0;
    for (const auto& [w, col] : all) {
        const auto it = part.find(w);
        const std::int64_t b = it == part.end() ? 0 : it->second;
        const std::int64_t a = col - b;
        if (a > 0) {
            g += static_cast<double>(a) *
                 std::log(static_cast<double>(a) * n /
                          (static_cast<double>(r1) * static_cast<double>(col)));
        }
        if (b > 0) {
            g += static_cast<double>(b) *
                 std::log(static_cast<double>(b) * n /
                          (static_cast<double>(r2) * static_cast<double>(col)));
        }
    }
    return std::max(0.0, 2.0 * g);
}

double class_log_likelihood(const std::map<Symbol, std::int64_t>& counts) {
    std::int64_t total = 0;
    for (const auto& [w, c] : counts) total += c;
    if (total == 0) return 0.0;
    double ll = 0.0;
    for (const auto& [w, c] : counts) {
        ll += static_cast<double>(c) *
              std::log(static_cast<double>(c) / static_cast<double>(total));
    }
    return ll;
}

}  // namespace

double extension_delta(const NgramCounts& counts, std::span<const Symbol> context,
                       Symbol symbol, DeltaRows rows) {
    const int len = static_cast<int>(context.size());
    if (counts.order() < len + 1) {
        throw std::invalid_argument("extension_delta: counts order too low for this context");
    }
    std::vector<Symbol> extended;
    extended.push_back(symbol);
    extended.insert(extended.end(), context.begin(), context.end());
    if (counts.context_count(extended) == 0) {
        throw std::invalid_argument("extension_delta: unseen candidate context");
    }
    if (counts.context_count(context) == 0) {
        throw std::invalid_argument("extension_delta: unseen parent context");
    }

    // successor tables T(cw) and T(sigma c w), read off the sorted gram maps
    std::map<Symbol, std::int64_t> parent, part;
    const std::string ctx_key = encode_tuple(context);
    const auto& parent_grams = counts.grams(len + 1);
    for (auto it = parent_grams.lower_bound(ctx_key); it != parent_grams.end(); ++it) {
        if (it->first.compare(0, ctx_key.size(), ctx_key) != 0) break;
        parent[decode_tuple(it->first).back()] = it->second;
    }
    const std::string ext_key = encode_tuple(extended);
    const auto& ext_grams = counts.grams(len + 2);
    for (auto it = ext_grams.lower_bound(ext_key); it != ext_grams.end(); ++it) {
        if (it->first.compare(0, ext_key.size(), ext_key) != 0) break;
        part[decode_tuple(it->first).back()] = it->second;
    }

    if (rows == DeltaRows::disjoint) {
        return split_g2(parent, part);
    }
    // overlapping rows, as printed: 2 sum_w T(scw) [ln(T(scw)/T(sc)) - ln(T(cw)/T(c))]
    const double t_sc = static_cast<double>(counts.context_count(extended));
    const double t_c = static_cast<double>(counts.context_count(context));
    double sum = 0.0;
    for (const auto& [w, b] : part) {
        const double cw = static_cast<double>(parent.at(w));
        sum += static_cast<double>(b) *
               std::log(static_cast<double>(b) * t_c / (t_sc * cw));
    }
    return 2.0 * sum;
}

double default_grow_epsilon(const Alphabet& alphabet) {
    return chi2_critical(1e-3, static_cast<std::int64_t>(alphabet.size()) - 1);
}

MixedModel grow_model(const Alphabet& alphabet, std::span<const Symbol> sequence,
                      double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("grow_model: epsilon must be >= 0");
    MixedModel model;
    model.alphabet_ = alphabet;
    model.epsilon_ = epsilon;
    if (sequence.empty()) {
        model.probs_[""] = {};
        return model;
    }

    const auto sym_at = [&](std::int64_t p) {
        return p < 0 ? alphabet.pad() : sequence[static_cast<std::size_t>(p)];
    };

    // positions resolved per context; every position belongs to exactly one
    std::map<std::string, std::vector<std::int64_t>> resolved;
    auto& root = resolved[""];
    root.resize(sequence.size());
    for (std::size_t p = 0; p < sequence.size(); ++p) root[p] = static_cast<std::int64_t>(p);

    const auto successor_counts = [&](const std::vector<std::int64_t>& positions) {
        std::map<Symbol, std::int64_t> counts;
        for (std::int64_t p : positions) ++counts[sequence[static_cast<std::size_t>(p)]];
        return counts;
    };

    double ll = 0.0;
    {
        const auto root_counts = successor_counts(root);
        ll = class_log_likelihood(root_counts);
    }
    model.initial_ll_ = ll;

    while (true) {
        double best_delta = -1.0;
        std::string best_key;
        for (const auto& [ctx_key, positions] : resolved) {
            const std::int64_t len = static_cast<std::int64_t>(ctx_key.size() / 2);
            const auto all = successor_counts(positions);
            // bucket this class by the symbol one step further back
            std::map<Symbol, std::map<Symbol, std::int64_t>> buckets;
            for (std::int64_t p : positions) {
                const Symbol sigma = sym_at(p - len - 1);
                if (sigma == alphabet.pad()) continue;   // phi never extends a context
                ++buckets[sigma][sequence[static_cast<std::size_t>(p)]];
            }
            for (const auto& [sigma, part] : buckets) {
                const double delta = split_g2(all, part);
                std::string key = encode_tuple(std::span<const Symbol>(&sigma, 1)) + ctx_key;
                if (delta > best_delta ||
                    (delta == best_delta && key < best_key)) {
                    best_delta = delta;
                    best_key = std::move(key);
                }
            }
        }
        if (best_delta <= epsilon) break;

        // move the matching positions from the parent class to the new one
        const std::string parent_key = best_key.substr(2);
        const Symbol sigma = decode_tuple(best_key.substr(0, 2)).front();
        const std::int64_t parent_len = static_cast<std::int64_t>(parent_key.size() / 2);
        auto& parent_positions = resolved[parent_key];
        std::vector<std::int64_t> moved, stay;
        for (std::int64_t p : parent_positions) {
            (sym_at(p - parent_len - 1) == sigma ? moved : stay).push_back(p);
        }
        parent_positions = std::move(stay);
        resolved[best_key] = std::move(moved);
        ll += best_delta / 2.0;
        GrowthStep step;
        step.context = decode_tuple(best_key);
        step.delta = best_delta;
        step.log_likelihood = ll;
        model.trace_.push_back(std::move(step));
    }

    // final model: MLE per resolved class (classes emptied by splits get no
    // distribution of their own but stay as contexts so lookup is total)
    for (const auto& [ctx_key, positions] : resolved) {
        auto& dist = model.probs_[ctx_key];
        const auto counts = successor_counts(positions);
        std::int64_t total = 0;
        for (const auto& [w, c] : counts) total += c;
        for (const auto& [w, c] : counts) {
            dist[w] = static_cast<double>(c) / static_cast<double>(total);
        }
        model.max_len_ = std::max(model.max_len_, static_cast<int>(ctx_key.size() / 2));
    }
    return model;
}

std::vector<Symbol> MixedModel::resolve(std::span<const Symbol> history) const {
    const int longest = std::min<int>(max_len_, static_cast<int>(history.size()));
    for (int len = longest; len >= 1; --len) {
        const auto suffix = history.subspan(history.size() - static_cast<std::size_t>(len));
        const auto it = probs_.find(encode_tuple(suffix));
        if (it != probs_.end()) return {suffix.begin(), suffix.end()};
    }
    return {};
}

double MixedModel::probability(std::span<const Symbol> history, Symbol symbol) const {
    const auto ctx = resolve(history);
    const auto it = probs_.find(encode_tuple(ctx));
    if (it == probs_.end()) return 0.0;
    const auto pit = it->second.find(symbol);
    return pit == it->second.end() ? 0.0 : pit->second;
}

QuasiBayesModel::QuasiBayesModel(NgramCounts counts, double alpha)
    : counts_(std::move(counts)), alpha_(alpha), adaptive_(false) {
    if (alpha <= 0.0) throw std::invalid_argument("QuasiBayesModel: alpha must be > 0");
}

QuasiBayesModel::QuasiBayesModel(NgramCounts counts)
    : counts_(std::move(counts)), adaptive_(true) {}

double QuasiBayesModel::probability(std::span<const Symbol> context, Symbol symbol) const {
    const int k = counts_.order();
    const int use = std::min<int>(k, static_cast<int>(context.size()));
    const auto clipped = context.subspan(context.size() - static_cast<std::size_t>(use));

    const std::size_t sigma = counts_.alphabet().size();
    const double n = static_cast<double>(counts_.source_length());
    // level 0: Laplace over the alphabet
    std::vector<double> dist(sigma);
    for (std::size_t s = 0; s < sigma; ++s) {
        const Symbol sym = static_cast<Symbol>(s);
        const double t = static_cast<double>(
            counts_.gram_count(std::span<const Symbol>(&sym, 1)));
        dist[s] = (t + 1.0) / (n + static_cast<double>(sigma));
    }
    std::vector<Symbol> tuple;
    for (int m = 1; m <= use; ++m) {
        const auto ctx_m = clipped.subspan(clipped.size() - static_cast<std::size_t>(m));
        double w = alpha_ * static_cast<double>(sigma);
        if (adaptive_) {
            // e^H of the lower-order distribution; in [1, |Sigma|]
            double h = 0.0;
            for (double p : dist) {
                if (p > 0.0) h -= p * std::log(p);
            }
            w = std::exp(h);
        }
        const double tc = static_cast<double>(counts_.context_count(ctx_m));
        std::vector<double> next(sigma);
        for (std::size_t s = 0; s < sigma; ++s) {
            tuple.assign(ctx_m.begin(), ctx_m.end());
            tuple.push_back(static_cast<Symbol>(s));
            const double t = static_cast<double>(counts_.gram_count(tuple));
            next[s] = (t + w * dist[s]) / (tc + w);
        }
        dist = std::move(next);
    }
    return dist[symbol];
}

namespace {

template <typename ProbFn>
PerplexityResult perplexity_impl(std::span<const Symbol> text, ProbFn&& prob) {
    if (text.empty()) throw std::invalid_argument("perplexity: empty text");
    double sum = 0.0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto history = text.subspan(0, i);
        const double p = prob(history, text[i]);
        if (p <= 0.0) {
            return PerplexityResult{std::numeric_limits<double>::infinity(), i};
        }
        sum += std::log(p);
    }
    return PerplexityResult{std::exp(-sum / static_cast<double>(text.size())), std::nullopt};
}

}  // namespace

PerplexityResult perplexity(const MixedModel& model, std::span<const Symbol> text) {
    return perplexity_impl(text, [&](std::span<const Symbol> h, Symbol s) {
        return model.probability(h, s);
    });
}

PerplexityResult perplexity(const QuasiBayesModel& model, std::span<const Symbol> text) {
    return perplexity_impl(text, [&](std::span<const Symbol> h, Symbol s) {
        return model.probability(h, s);
    });
}

namespace {

nlohmann::json alphabet_to_json(const Alphabet& a) {
    nlohmann::json j;
    j["mode"] = a.mode() == Alphabet::Mode::bytes ? "bytes" : "tokens";
    if (a.mode() == Alphabet::Mode::tokens) {
        j["vocabulary"] = a.vocabulary();
        j["unknown"] = a.unknown_token();
    }
    return j;
}

Alphabet alphabet_from_json(const nlohmann::json& j) {
    if (j.at("mode").get<std::string>() == "tokens") {
        return Alphabet::tokens(j.at("vocabulary").get<std::vector<std::string>>(),
                                j.at("unknown").get<std::string>());
    }
    return Alphabet::bytes();
}

std::string context_to_readable(const std::string& key) {
    std::string readable;
    for (Symbol s : decode_tuple(key)) {
        if (!readable.empty()) readable.push_back(' ');
        readable += std::to_string(s);
    }
    return readable;
}

std::string context_from_readable(const std::string& readable) {
    std::vector<Symbol> tuple;
    std::size_t pos = 0;
    while (pos < readable.size()) {
        std::size_t next = readable.find(' ', pos);
        if (next == std::string::npos) next = readable.size();
        tuple.push_back(static_cast<Symbol>(std::stoul(readable.substr(pos, next - pos))));
        pos = next + 1;
    }
    return encode_tuple(tuple);
}

}  // namespace

MixedModel mixed_model_from_json_parts(Alphabet alphabet, double epsilon,
                                       std::map<std::string, std::map<Symbol, double>> probs) {
    MixedModel m;
    m.alphabet_ = std::move(alphabet);
    m.epsilon_ = epsilon;
    m.probs_ = std::move(probs);
    for (const auto& [key, dist] : m.probs_) {
        m.max_len_ = std::max(m.max_len_, static_cast<int>(key.size() / 2));
    }
    return m;
}

std::string mixed_model_to_json(const MixedModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["type"] = "mixed";
    j["alphabet"] = alphabet_to_json(model.alphabet());
    j["epsilon"] = model.epsilon();
    nlohmann::json ctxs = nlohmann::json::object();
    for (const auto& [key, dist] : model.contexts()) {
        nlohmann::json d = nlohmann::json::object();
        for (const auto& [sym, p] : dist) d[std::to_string(sym)] = p;
        ctxs[context_to_readable(key)] = d;
    }
    j["contexts"] = ctxs;
    return j.dump(2) + "\n";
}

MixedModel mixed_model_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.at("format_version").get<int>() != 1 || j.at("type").get<std::string>() != "mixed") {
        throw std::invalid_argument("mixed model load: wrong format");
    }
    std::map<std::string, std::map<Symbol, double>> probs;
    for (const auto& [readable, dist] : j.at("contexts").items()) {
        std::map<Symbol, double> d;
        for (const auto& [sym, p] : dist.items()) {
            d[static_cast<Symbol>(std::stoul(sym))] = p.get<double>();
        }
        probs[context_from_readable(readable)] = std::move(d);
    }
    return mixed_model_from_json_parts(alphabet_from_json(j.at("alphabet")),
                                       j.at("epsilon").get<double>(), std::move(probs));
}

std::string quasi_bayes_to_json(const QuasiBayesModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["type"] = "quasi_bayes";
    j["adaptive"] = model.adaptive();
    j["alpha"] = model.alpha();
    j["counts"] = nlohmann::json::parse(ngram_counts_to_json(model.counts()));
    return j.dump(2) + "\n";
}

QuasiBayesModel quasi_bayes_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.at("format_version").get<int>() != 1 ||
        j.at("type").get<std::string>() != "quasi_bayes") {
        throw std::invalid_argument("quasi-bayes model load: wrong format");
    }
    auto lc = ngram_counts_from_json(j.at("counts").dump());
    if (j.at("adaptive").get<bool>()) {
        return QuasiBayesModel(std::move(lc.counts));
    }
    return QuasiBayesModel(std::move(lc.counts), j.at("alpha").get<double>());
}

}  // namespace surprise
