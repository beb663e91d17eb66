#include "surprise/classify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "surprise/parallel.hpp"
#include "surprise/rng.hpp"

namespace surprise {

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_ws = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

std::string fold_case(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

Classifier::Classifier(std::vector<CategoryModel> categories, int order, double alpha,
                       std::optional<std::string> default_label)
    : categories_(std::move(categories)), order_(order), alpha_(alpha) {
    if (categories_.empty()) throw std::invalid_argument("Classifier: no categories");
    std::set<std::string> seen;
    for (const auto& c : categories_) {
        if (!seen.insert(c.label).second) {
            throw std::invalid_argument("Classifier: duplicate label " + c.label);
        }
        if (c.counts.empty()) throw std::invalid_argument("Classifier: empty counts for " + c.label);
        if (c.counts.order() < order_) {
            throw std::invalid_argument("Classifier: category order below classifier order");
        }
        if (!(c.counts.alphabet() == categories_.front().counts.alphabet())) {
            throw std::invalid_argument("Classifier: categories disagree on alphabet");
        }
    }
    if (default_label) {
        if (!seen.count(*default_label)) {
            throw std::invalid_argument("Classifier: default label is not a category");
        }
        default_label_ = *default_label;
    } else {
        default_label_ = *seen.begin();   // lexicographically first
    }
}

Classification Classifier::classify(std::span<const Symbol> test) const {
    Classification out;
    if (test.empty()) {
        // no data: the default policy answers
        out.label = default_label_;
        for (const auto& c : categories_) out.scores.emplace_back(c.label, 0.0);
        std::sort(out.scores.begin(), out.scores.end());
        return out;
    }
    const NgramCounts test_counts = NgramCounts::count(alphabet(), test, order_);
    for (const auto& c : categories_) {
        out.scores.emplace_back(c.label, compat_score(test_counts, c.counts, order_, alpha_));
    }
    std::sort(out.scores.begin(), out.scores.end());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [label, s] : out.scores) best = std::min(best, s);
    std::vector<std::string> tied;
    for (const auto& [label, s] : out.scores) {
        if (s == best) tied.push_back(label);
    }
    if (tied.size() == out.scores.size() &&
        std::find(tied.begin(), tied.end(), default_label_) != tied.end()) {
        out.label = default_label_;       // full tie: the configured default answers
    } else {
        out.label = tied.front();         // partial tie: first label in order
    }
    return out;
}

Classification Classifier::classify_text(std::string_view text) const {
    const auto symbols = alphabet().encode(text);
    return classify(symbols);
}

std::vector<std::pair<std::string, double>> Classifier::soft_classify(
    std::span<const Symbol> test) const {
    const auto cls = classify(test);
    const double len = test.empty() ? 1.0 : static_cast<double>(test.size());
    double smin = std::numeric_limits<double>::infinity();
    for (const auto& [label, s] : cls.scores) smin = std::min(smin, s);
    std::vector<std::pair<std::string, double>> q;
    double z = 0.0;
    for (const auto& [label, s] : cls.scores) {
        const double w = std::exp(-(s - smin) / (2.0 * len));
        q.emplace_back(label, w);
        z += w;
    }
    for (auto& [label, w] : q) w /= z;
    return q;
}

Classifier train(const std::vector<std::pair<std::string, std::string>>& corpora,
                 int order, double alpha, const Alphabet& alphabet, bool collapse_ws) {
    if (corpora.empty()) throw std::invalid_argument("train: no corpora");
    std::vector<CategoryModel> categories;
    for (const auto& [label, text] : corpora) {
        if (text.empty()) throw std::invalid_argument("train: empty corpus for " + label);
        const std::string prepared = collapse_ws ? collapse_whitespace(text) : std::string(text);
        const auto symbols = alphabet.encode(prepared);
        CategoryModel m{label, NgramCounts::count(alphabet, symbols, order),
                        static_cast<std::int64_t>(symbols.size())};
        categories.push_back(std::move(m));
    }
    return Classifier(std::move(categories), order, alpha);
}

CrossEntropyResult cross_entropy(
    const Classifier& classifier,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& labeled_tests) {
    CrossEntropyResult out;
    double total = 0.0;
    bool infinite = false;
    for (const auto& [label, tests] : labeled_tests) {
        if (tests.empty()) throw std::invalid_argument("cross_entropy: empty test set for " + label);
        double sum = 0.0;
        for (std::size_t t = 0; t < tests.size(); ++t) {
            const auto symbols = classifier.alphabet().encode(tests[t]);
            const auto q = classifier.soft_classify(symbols);
            double q_true = 0.0;
            for (const auto& [l, p] : q) {
                if (l == label) q_true = p;
            }
            if (q_true <= 0.0) {
                infinite = true;
                out.zero_cases.push_back(label + "#" + std::to_string(t));
                continue;
            }
            sum -= std::log2(q_true);
        }
        total += sum / static_cast<double>(tests.size());
    }
    out.bits = infinite ? std::numeric_limits<double>::infinity() : total;
    return out;
}

EvalSuite make_eval_suite(const std::map<std::string, std::string>& corpus_per_label,
                          const SuiteConfig& config, std::uint64_t seed) {
    if (corpus_per_label.empty()) throw std::invalid_argument("make_eval_suite: no corpora");
    if (config.train_sizes.empty() || config.test_sizes.empty()) {
        throw std::invalid_argument("make_eval_suite: empty size lists");
    }
    EvalSuite suite;
    suite.seed = seed;
    suite.train_sizes = config.train_sizes;
    suite.test_sizes = config.test_sizes;
    suite.per_train_size = config.per_train_size;
    suite.per_test_size = config.per_test_size;

    const std::int64_t max_train =
        *std::max_element(config.train_sizes.begin(), config.train_sizes.end());
    const std::int64_t max_test =
        *std::max_element(config.test_sizes.begin(), config.test_sizes.end());

    Rng rng(seed);
    // map iteration is label-sorted, so the draw order is reproducible
    for (const auto& [label, corpus] : corpus_per_label) {
        const std::string collapsed = collapse_whitespace(corpus);
        const std::int64_t len = static_cast<std::int64_t>(collapsed.size());
        if (len < max_train + max_test) {
            throw std::invalid_argument("make_eval_suite: corpus for " + label + " too small");
        }
        auto sample = [&](std::int64_t size) {
            const std::int64_t offset =
                static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(len - size + 1)));
            return SuiteText{size, offset,
                             collapsed.substr(static_cast<std::size_t>(offset),
                                              static_cast<std::size_t>(size))};
        };
        auto& train_texts = suite.train_texts[label];
        for (std::int64_t size : config.train_sizes) {
            for (int i = 0; i < config.per_train_size; ++i) train_texts.push_back(sample(size));
        }
        auto& test_texts = suite.test_texts[label];
        for (std::int64_t size : config.test_sizes) {
            for (int i = 0; i < config.per_test_size; ++i) test_texts.push_back(sample(size));
        }
    }
    return suite;
}

namespace {

nlohmann::json texts_to_json(const std::vector<SuiteText>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : v) {
        arr.push_back({{"size", t.size}, {"offset", t.offset}, {"text", t.text}});
    }
    return arr;
}

std::vector<SuiteText> texts_from_json(const nlohmann::json& arr) {
    std::vector<SuiteText> v;
    for (const auto& t : arr) {
        v.push_back(SuiteText{t.at("size").get<std::int64_t>(),
                              t.at("offset").get<std::int64_t>(),
                              t.at("text").get<std::string>()});
    }
    return v;
}

double percentile(const std::vector<double>& sorted_values, double pct) {
    const double idx = pct / 100.0 * static_cast<double>(sorted_values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
    const double frac = idx - static_cast<double>(lo);
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string eval_suite_to_json(const EvalSuite& suite) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["seed"] = suite.seed;
    j["train_sizes"] = suite.train_sizes;
    j["test_sizes"] = suite.test_sizes;
    j["per_train_size"] = suite.per_train_size;
    j["per_test_size"] = suite.per_test_size;
    nlohmann::json train_texts = nlohmann::json::object();
    nlohmann::json test_texts = nlohmann::json::object();
    for (const auto& [label, texts] : suite.train_texts) train_texts[label] = texts_to_json(texts);
    for (const auto& [label, texts] : suite.test_texts) test_texts[label] = texts_to_json(texts);
    j["train_texts"] = train_texts;
    j["test_texts"] = test_texts;
    return j.dump(2) + "\n";
}

EvalSuite eval_suite_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.at("format_version").get<int>() != 1) {
        throw std::invalid_argument("suite load: unsupported format_version");
    }
    EvalSuite suite;
    suite.seed = j.at("seed").get<std::uint64_t>();
    suite.train_sizes = j.at("train_sizes").get<std::vector<std::int64_t>>();
    suite.test_sizes = j.at("test_sizes").get<std::vector<std::int64_t>>();
    suite.per_train_size = j.at("per_train_size").get<int>();
    suite.per_test_size = j.at("per_test_size").get<int>();
    for (const auto& [label, texts] : j.at("train_texts").items()) {
        suite.train_texts[label] = texts_from_json(texts);
    }
    for (const auto& [label, texts] : j.at("test_texts").items()) {
        suite.test_texts[label] = texts_from_json(texts);
    }
    return suite;
}

EvalReport evaluate(const EvalSuite& suite, std::span<const int> orders, double alpha,
                    std::uint64_t seed) {
    if (suite.train_texts.empty()) throw std::invalid_argument("evaluate: empty suite");
    std::vector<std::string> labels;
    for (const auto& [label, texts] : suite.train_texts) labels.push_back(label);

    struct GridCell {
        int order;
        std::size_t train_idx;
    };
    std::vector<GridCell> grid;
    for (int k : orders) {
        for (std::size_t ti = 0; ti < suite.train_sizes.size(); ++ti) {
            grid.push_back({k, ti});
        }
    }

    EvalReport report;
    std::vector<std::vector<EvalCell>> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t gi) {
        const auto [k, ti] = grid[gi];
        const std::int64_t train_size = suite.train_sizes[ti];
        const Alphabet alphabet = Alphabet::bytes();

        std::vector<std::vector<double>> errors(suite.test_sizes.size());
        std::vector<std::vector<double>> xents(suite.test_sizes.size());
        for (int rep = 0; rep < suite.per_train_size; ++rep) {
            std::vector<CategoryModel> cats;
            for (const auto& label : labels) {
                const auto& texts = suite.train_texts.at(label);
                const auto& t = texts.at(ti * suite.per_train_size + rep);
                const auto symbols = alphabet.encode(t.text);
                cats.push_back(CategoryModel{label, NgramCounts::count(alphabet, symbols, k),
                                             static_cast<std::int64_t>(symbols.size())});
            }
            const Classifier clf(std::move(cats), k, alpha);
            for (std::size_t si = 0; si < suite.test_sizes.size(); ++si) {
                std::int64_t wrong = 0, total = 0;
                std::vector<std::pair<std::string, std::vector<std::string>>> labeled;
                for (const auto& label : labels) {
                    const auto& tests = suite.test_texts.at(label);
                    std::vector<std::string> per_label;
                    for (int i = 0; i < suite.per_test_size; ++i) {
                        const auto& t = tests.at(si * suite.per_test_size + i);
                        per_label.push_back(t.text);
                        if (clf.classify_text(t.text).label != label) ++wrong;
                        ++total;
                    }
                    labeled.emplace_back(label, std::move(per_label));
                }
                errors[si].push_back(static_cast<double>(wrong) / static_cast<double>(total));
                xents[si].push_back(cross_entropy(clf, labeled).bits);
            }
        }

        std::vector<EvalCell> cells;
        for (std::size_t si = 0; si < suite.test_sizes.size(); ++si) {
            EvalCell cell;
            cell.train_size = train_size;
            cell.test_size = suite.test_sizes[si];
            cell.order = k;
            cell.err_median = median(errors[si]);
            cell.err_best = *std::min_element(errors[si].begin(), errors[si].end());
            cell.err_worst = *std::max_element(errors[si].begin(), errors[si].end());
            cell.cross_entropy_bits = median(xents[si]);
            const Band band = bootstrap_band(errors[si], 1000,
                                             seed ^ (gi * 1315423911ull + si));
            cell.band_low = band.low;
            cell.band_high = band.high;
            cells.push_back(cell);
        }
        rows[gi] = std::move(cells);
    });
    for (auto& r : rows) {
        report.cells.insert(report.cells.end(), r.begin(), r.end());
    }
    return report;
}

Band bootstrap_band(std::span<const double> values, int replicates, std::uint64_t seed,
                    double low_pct, double high_pct) {
    if (values.empty()) throw std::invalid_argument("bootstrap_band: empty input");
    std::vector<double> copy(values.begin(), values.end());
    return bootstrap_band_stat(
        copy.size(), replicates, seed,
        [&copy](std::span<const std::size_t> idx) {
            double s = 0.0;
            for (std::size_t i : idx) s += copy[i];
            return s / static_cast<double>(idx.size());
        },
        low_pct, high_pct);
}

Band bootstrap_band_stat(std::size_t n, int replicates, std::uint64_t seed,
                         const std::function<double(std::span<const std::size_t>)>& statistic,
                         double low_pct, double high_pct) {
    if (n == 0) throw std::invalid_argument("bootstrap_band_stat: empty input");
    if (replicates < 1) throw std::invalid_argument("bootstrap_band_stat: need >= 1 replicate");
    Rng rng(seed);
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(replicates));
    std::vector<std::size_t> idx(n);
    for (int r = 0; r < replicates; ++r) {
        for (std::size_t i = 0; i < n; ++i) idx[i] = rng.bounded(n);
        stats.push_back(statistic(idx));
    }
    std::sort(stats.begin(), stats.end());
    return Band{percentile(stats, low_pct), percentile(stats, high_pct)};
}

}  // namespace surprise
