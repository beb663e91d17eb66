#include "cli_app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "surprise/classify.hpp"
#include "surprise/colloc.hpp"
#include "surprise/mixedmarkov.hpp"
#include "surprise/ngram.hpp"
#include "surprise/report.hpp"
#include "surprise/route.hpp"
#include "surprise/seqstruct.hpp"
#include "surprise/special.hpp"
#include "surprise/tables.hpp"

namespace surprise {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_directory(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file()) paths.push_back(e.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<std::string> docs;
    for (const auto& p : paths) docs.push_back(read_file(p.string()));
    if (docs.empty()) throw std::runtime_error("directory has no files: " + dir);
    return docs;
}

ContingencyTable table_from_flags(const std::string& cells, const std::string& table_path,
                                  std::size_t rows, std::size_t cols) {
    if (!table_path.empty()) return ContingencyTable::parse_tsv(read_file(table_path));
    if (cells.empty()) throw std::runtime_error("need --cells or --table");
    std::istringstream in(cells);
    std::vector<std::int64_t> values;
    double v;
    while (in >> v) {
        if (v < 0 || v != static_cast<std::int64_t>(v)) {
            throw std::runtime_error("cells must be non-negative integers");
        }
        values.push_back(static_cast<std::int64_t>(v));
    }
    if (rows == 0) {
        if (values.size() == 4) {
            rows = cols = 2;
        } else {
            throw std::runtime_error("non-2x2 cell lists need --rows and --cols");
        }
    }
    return ContingencyTable(rows, cols, std::move(values));
}

std::vector<std::int64_t> parse_positions(const std::string& spec) {
    // "a..b" inclusive range, or comma-separated values
    std::vector<std::int64_t> out;
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const std::int64_t a = std::stoll(spec.substr(0, dots));
        const std::int64_t b = std::stoll(spec.substr(dots + 2));
        if (b < a) throw std::runtime_error("bad position range: " + spec);
        for (std::int64_t p = a; p <= b; ++p) out.push_back(p);
        return out;
    }
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(std::stoll(item));
    }
    if (out.empty()) throw std::runtime_error("empty position list: " + spec);
    return out;
}

std::vector<SequenceRecord> load_records(const std::string& fasta_path,
                                         const std::string& boundary_path) {
    auto records = parse_fasta(read_file(fasta_path));
    if (!boundary_path.empty()) apply_boundary_tsv(records, read_file(boundary_path));
    return records;
}

struct Common {
    std::uint64_t seed = 0;
    std::string format = "tsv";
    std::string output = "-";
    std::vector<std::string> raw_args;

    std::string header(const std::string& command) const {
        return report_header(command, seed, raw_args);
    }
    bool json() const { return format == "json"; }
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--seed", common.seed, "random seed (recorded in the output header)");
    cmd->add_option("--format", common.format, "output format: tsv or json")
        ->check(CLI::IsMember({"tsv", "json"}));
    cmd->add_option("-o,--output", common.output, "output path ('-' = stdout)");
}

void emit_test_result(const Common& common, const std::string& command,
                      const TestResult& result) {
    if (common.json()) {
        write_output(common.output, test_result_json(result));
    } else {
        write_output(common.output, common.header(command) + test_result_tsv(result));
    }
}

// ---- subcommand bodies ----

void cmd_table_test(const Common& common, const std::string& cells, const std::string& table,
                    std::size_t rows, std::size_t cols, bool pearson) {
    const ContingencyTable t = table_from_flags(cells, table, rows, cols);
    emit_test_result(common, pearson ? "chi2" : "g2", pearson ? pearson_test(t) : g2_test(t));
}

void cmd_colloc_rank(const Common& common, const std::string& file, const std::string& method,
                     std::size_t top, bool line_delimited) {
    TokenizerOptions opts;
    opts.line_delimited = line_delimited;
    const TokenStream stream = tokenize(read_file(file), opts);
    const auto ranked = rank_bigrams(
        stream, method == "pearson" ? RankMethod::pearson : RankMethod::g2, top);
    if (common.json()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& sb : ranked) {
            arr.push_back({{"a", sb.a}, {"b", sb.b}, {"t_ab", sb.t_ab}, {"t_a_nb", sb.t_a_nb},
                           {"t_na_b", sb.t_na_b}, {"t_na_nb", sb.t_na_nb}, {"g2", sb.g2},
                           {"pearson", sb.pearson}, {"applicable", sb.applicable}});
        }
        write_output(common.output, arr.dump(2) + "\n");
        return;
    }
    std::string out = common.header("colloc rank");
    for (const auto& sb : ranked) {
        const double score = method == "pearson" ? sb.pearson : sb.g2;
        out += format_statistic(score) + "\t" + std::to_string(sb.t_ab) + "\t" +
               std::to_string(sb.t_a_nb) + "\t" + std::to_string(sb.t_na_b) + "\t" +
               std::to_string(sb.t_na_nb) + "\t" + sb.a + "\t" + sb.b + "\n";
    }
    write_output(common.output, out);
}

void cmd_zipf(const Common& common, const std::string& file) {
    const TokenStream stream = tokenize(read_file(file));
    const auto profile = zipf_profile(stream);
    if (common.json()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [f, c] : profile) arr.push_back({{"frequency", f}, {"word_count", c}});
        write_output(common.output, arr.dump(2) + "\n");
        return;
    }
    std::string out = common.header("zipf");
    for (const auto& [f, c] : profile) {
        out += std::to_string(f) + "\t" + std::to_string(c) + "\n";
    }
    write_output(common.output, out);
}

void cmd_langid_train(const Common& common, const std::string& label,
                      const std::vector<std::string>& files, int order, bool fold) {
    std::string corpus;
    for (const auto& f : files) corpus += read_file(f);
    if (corpus.empty()) throw std::runtime_error("training corpus is empty");
    std::string prepared = collapse_whitespace(corpus);
    if (fold) prepared = fold_case(prepared);
    const Alphabet alphabet = Alphabet::bytes();
    const auto symbols = alphabet.encode(prepared);
    const NgramCounts counts = NgramCounts::count(alphabet, symbols, order);
    write_output(common.output, ngram_counts_to_json(counts, label));
}

void cmd_langid_classify(const Common& common, const std::vector<std::string>& model_files,
                         const std::string& input, double alpha) {
    std::vector<CategoryModel> cats;
    int order = -1;
    for (const auto& f : model_files) {
        auto lc = ngram_counts_from_json(read_file(f));
        if (lc.label.empty()) throw std::runtime_error("model has no label: " + f);
        if (order < 0) order = lc.counts.order();
        order = std::min(order, lc.counts.order());
        const std::int64_t size = lc.counts.source_length();
        cats.push_back(CategoryModel{lc.label, std::move(lc.counts), size});
    }
    const Classifier clf(std::move(cats), order, alpha);
    const std::string text = collapse_whitespace(read_file(input));
    const auto cls = clf.classify_text(text);
    if (common.json()) {
        nlohmann::json j;
        j["label"] = cls.label;
        nlohmann::json scores = nlohmann::json::object();
        for (const auto& [l, s] : cls.scores) scores[l] = s;
        j["scores"] = scores;
        write_output(common.output, j.dump(2) + "\n");
        return;
    }
    std::string out = common.header("langid classify");
    for (const auto& [l, s] : cls.scores) {
        out += l + "\t" + format_statistic(s) + "\t" + (l == cls.label ? "1" : "0") + "\n";
    }
    write_output(common.output, out);
}

void cmd_langid_suite(const Common& common, const std::vector<std::string>& labels,
                      const std::vector<std::string>& files) {
    if (labels.size() != files.size()) {
        throw std::runtime_error("--label and corpus files must pair up");
    }
    std::map<std::string, std::string> corpora;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!corpora.emplace(labels[i], read_file(files[i])).second) {
            throw std::runtime_error("duplicate label: " + labels[i]);
        }
    }
    const EvalSuite suite = make_eval_suite(corpora, SuiteConfig{}, common.seed);
    write_output(common.output, eval_suite_to_json(suite));
}

void cmd_langid_eval(const Common& common, const std::string& suite_path,
                     const std::string& orders_spec, double alpha) {
    const EvalSuite suite = eval_suite_from_json(read_file(suite_path));
    std::vector<int> orders;
    std::istringstream in(orders_spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) orders.push_back(std::stoi(item));
    }
    if (orders.empty()) throw std::runtime_error("no orders given");
    const EvalReport report = evaluate(suite, orders, alpha, common.seed);
    if (common.json()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : report.cells) {
            arr.push_back({{"train_size", c.train_size}, {"test_size", c.test_size},
                           {"order", c.order}, {"err_median", c.err_median},
                           {"err_best", c.err_best}, {"err_worst", c.err_worst},
                           {"cross_entropy", c.cross_entropy_bits},
                           {"band_low", c.band_low}, {"band_high", c.band_high}});
        }
        write_output(common.output, arr.dump(2) + "\n");
        return;
    }
    std::string out = common.header("langid eval");
    char buf[160];
    for (const auto& c : report.cells) {
        std::snprintf(buf, sizeof(buf), "%lld\t%lld\t%d\t%.4f\t%.4f\t%.4f\t%.4f\n",
                      static_cast<long long>(c.train_size),
                      static_cast<long long>(c.test_size), c.order, c.err_median,
                      c.err_best, c.err_worst, c.cross_entropy_bits);
        out += buf;
    }
    write_output(common.output, out);
}

std::string routing_query_tsv(const Common& common, const std::string& command,
                              const RoutingQuery& query) {
    std::string out = common.header(command);
    for (const auto& t : query.terms) {
        out += format_statistic(t.g2) + "\t" + std::to_string(t.t_rel) + "\t" +
               std::to_string(t.t_nonrel) + "\t" + t.term + "\n";
    }
    return out;
}

void emit_routing_query(const Common& common, const std::string& command,
                        const RoutingQuery& query) {
    if (common.json()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : query.terms) {
            arr.push_back({{"term", t.term}, {"g2", t.g2}, {"t_rel", t.t_rel},
                           {"t_nonrel", t.t_nonrel}});
        }
        write_output(common.output, arr.dump(2) + "\n");
    } else {
        write_output(common.output, routing_query_tsv(common, command, query));
    }
}

void cmd_route_select(const Common& common, const std::string& rel_dir,
                      const std::string& nonrel_dir, double threshold, bool count_docs) {
    const auto corpus = LabeledCorpus::from_documents(read_directory(rel_dir),
                                                      read_directory(nonrel_dir), count_docs);
    emit_routing_query(common, "route select", select_terms(corpus, threshold));
}

void cmd_keyterms(const Common& common, const std::string& target,
                  const std::string& reference, double threshold) {
    const auto load = [](const std::string& path) {
        return fs::is_directory(path) ? read_directory(path)
                                      : std::vector<std::string>{read_file(path)};
    };
    emit_routing_query(common, "keyterms", key_terms(load(target), load(reference), threshold));
}

void cmd_route_rank(const Common& common, const std::string& query_path,
                    const std::vector<std::string>& doc_paths) {
    // query file: TSV rows (g2, T(t,R), T(t,N), term), i.e. route select output
    RoutingQuery query;
    std::istringstream in(read_file(query_path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        ScoredTerm t;
        if (!(ls >> t.g2 >> t.t_rel >> t.t_nonrel >> t.term)) {
            throw std::runtime_error("bad query line: " + line);
        }
        query.terms.push_back(std::move(t));
    }
    std::vector<Document> docs;
    for (const auto& p : doc_paths) {
        docs.push_back(Document{fs::path(p).filename().string(), tokenize(read_file(p))});
    }
    const auto ranked = rank_documents(query, docs, CorpusStats::from_documents(docs));
    if (common.json()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : ranked) arr.push_back({{"doc_id", r.id}, {"score", r.score}});
        write_output(common.output, arr.dump(2) + "\n");
        return;
    }
    std::string out = common.header("route rank");
    char buf[64];
    for (const auto& r : ranked) {
        std::snprintf(buf, sizeof(buf), "%.4f", r.score);
        out += std::string(buf) + "\t" + r.id + "\n";
    }
    write_output(common.output, out);
}

void cmd_posinfo(const Common& common, const std::string& fasta, const std::string& boundaries,
                 const std::string& positions_spec, int replicates) {
    const auto records = load_records(fasta, boundaries);
    const auto positions = parse_positions(positions_spec);
    const auto info = positional_information(records, positions, replicates, common.seed);
    if (common.json()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& pi : info) {
            arr.push_back({{"position", pi.position}, {"bits", pi.bits}, {"low", pi.low},
                           {"high", pi.high}, {"n_records", pi.n_records}});
        }
        write_output(common.output, arr.dump(2) + "\n");
        return;
    }
    std::string out = common.header("posinfo");
    char buf[128];
    for (const auto& pi : info) {
        std::snprintf(buf, sizeof(buf), "%lld\t%.4f\t%.4f\t%.4f\t%lld\n",
                      static_cast<long long>(pi.position), pi.bits, pi.low, pi.high,
                      static_cast<long long>(pi.n_records));
        out += buf;
    }
    write_output(common.output, out);
}

void cmd_paircorr(const Common& common, const std::string& fasta, const std::string& boundaries,
                  std::int64_t left, std::int64_t right) {
    const auto records = load_records(fasta, boundaries);
    const auto [table, result] = pair_correlation(records, left, right);
    if (common.json()) {
        nlohmann::json j;
        j["pos_left"] = left;
        j["pos_right"] = right;
        j["n_records"] = table.n_records;
        j["statistic"] = result.statistic;
        j["df"] = result.df;
        j["p_value"] = result.p_value;
        nlohmann::json cells = nlohmann::json::array();
        for (std::size_t i = 0; i < table.table.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t jx = 0; jx < table.table.cols(); ++jx) {
                row.push_back(table.table.at(i, jx));
            }
            cells.push_back(row);
        }
        j["cells"] = cells;
        write_output(common.output, j.dump(2) + "\n");
        return;
    }
    std::string out = common.header("paircorr");
    out += test_result_tsv(result);
    for (std::size_t i = 0; i < table.table.rows(); ++i) {
        std::string row;
        for (std::size_t jx = 0; jx < table.table.cols(); ++jx) {
            if (!row.empty()) row += "\t";
            row += std::to_string(table.table.at(i, jx));
        }
        out += row + "\n";
    }
    write_output(common.output, out);
}

void cmd_structure(const Common& common, const std::string& fasta, const std::string& boundaries,
                   const std::string& left_spec, const std::string& right_spec,
                   const std::string& cdf_out) {
    const auto records = load_records(fasta, boundaries);
    const auto left = parse_positions(left_spec);
    const auto right = parse_positions(right_spec);
    const StructureReport report = region_structure(records, left, right);
    if (common.json()) {
        nlohmann::json j;
        j["ks_distance"] = report.ks_distance;
        j["ks_p_value"] = report.ks_p_value;
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& p : report.pairs) {
            pairs.push_back({{"pos_left", p.pos_left}, {"pos_right", p.pos_right},
                             {"g2", p.g2}, {"p_value", p.p_value}});
        }
        j["pairs"] = pairs;
        nlohmann::json skipped = nlohmann::json::array();
        for (const auto& [l, r] : report.skipped_degenerate) skipped.push_back({l, r});
        j["skipped_degenerate"] = skipped;
        write_output(common.output, j.dump(2) + "\n");
    } else {
        std::string out = common.header("structure");
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", report.ks_distance);
        out += "# ks_distance: " + std::string(buf) + "\n";
        out += "# ks_p_value: " + format_p(report.ks_p_value) + "\n";
        out += "# skipped_degenerate: " + std::to_string(report.skipped_degenerate.size()) + "\n";
        for (const auto& p : report.pairs) {
            out += std::to_string(p.pos_left) + "\t" + std::to_string(p.pos_right) + "\t" +
                   format_statistic(p.g2) + "\t" + format_p(p.p_value) + "\n";
        }
        write_output(common.output, out);
    }
    if (!cdf_out.empty()) {
        std::string out = common.header("structure cdf");
        const std::size_t n = report.sorted_g2.size();
        char buf[128];
        for (std::size_t i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f\n", report.sorted_g2[i],
                          static_cast<double>(i + 1) / static_cast<double>(n),
                          chi2_cdf(report.sorted_g2[i], 9));
            out += buf;
        }
        write_output(cdf_out, out);
    }
}

void cmd_dedup(const Common& common, const std::string& fasta, const std::string& removed_out,
               double identity, int nmer) {
    const auto records = parse_fasta(read_file(fasta));
    const DedupResult result = dedup(records, identity, nmer);
    std::string out;
    for (const auto& r : result.kept) {
        out += ">" + r.id + "\n";
        if (r.boundary) {
            out += r.residues.substr(0, static_cast<std::size_t>(*r.boundary)) + "|" +
                   r.residues.substr(static_cast<std::size_t>(*r.boundary)) + "\n";
        } else {
            out += r.residues + "\n";
        }
    }
    write_output(common.output, out);
    if (!removed_out.empty()) {
        std::string removed = common.header("dedup removed");
        for (const auto& id : result.removed_ids) removed += id + "\n";
        write_output(removed_out, removed);
    }
}

void cmd_mm_grow(const Common& common, const std::string& corpus_path, double epsilon,
                 bool epsilon_set, const std::string& vocab_path) {
    Alphabet alphabet = Alphabet::bytes();
    if (!vocab_path.empty()) {
        std::vector<std::string> vocab;
        std::istringstream in(read_file(vocab_path));
        std::string word;
        while (in >> word) vocab.push_back(word);
        alphabet = Alphabet::tokens(std::move(vocab));
    }
    const auto symbols = alphabet.encode(read_file(corpus_path));
    const double eps = epsilon_set ? epsilon : default_grow_epsilon(alphabet);
    const MixedModel model = grow_model(alphabet, symbols, eps);
    write_output(common.output, mixed_model_to_json(model));
}

void cmd_mm_qb(const Common& common, const std::string& corpus_path, int order, double alpha,
               bool adaptive, const std::string& vocab_path) {
    Alphabet alphabet = Alphabet::bytes();
    if (!vocab_path.empty()) {
        std::vector<std::string> vocab;
        std::istringstream in(read_file(vocab_path));
        std::string word;
        while (in >> word) vocab.push_back(word);
        alphabet = Alphabet::tokens(std::move(vocab));
    }
    const auto symbols = alphabet.encode(read_file(corpus_path));
    NgramCounts counts = NgramCounts::count(alphabet, symbols, order);
    if (adaptive) {
        write_output(common.output, quasi_bayes_to_json(QuasiBayesModel(std::move(counts))));
    } else {
        write_output(common.output, quasi_bayes_to_json(QuasiBayesModel(std::move(counts), alpha)));
    }
}

void cmd_mm_perplexity(const Common& common, const std::string& model_path,
                       const std::string& text_path) {
    const std::string model_text = read_file(model_path);
    const nlohmann::json j = nlohmann::json::parse(model_text);
    const std::string type = j.at("type").get<std::string>();
    PerplexityResult result;
    if (type == "mixed") {
        const MixedModel model = mixed_model_from_json(model_text);
        result = perplexity(model, model.alphabet().encode(read_file(text_path)));
    } else if (type == "quasi_bayes") {
        const QuasiBayesModel model = quasi_bayes_from_json(model_text);
        result = perplexity(model, model.alphabet().encode(read_file(text_path)));
    } else {
        throw std::runtime_error("unknown model type: " + type);
    }
    if (common.json()) {
        nlohmann::json out;
        out["perplexity"] = result.perplexity;
        if (result.zero_position) out["zero_position"] = *result.zero_position;
        write_output(common.output, out.dump(2) + "\n");
        return;
    }
    std::string out = common.header("mm perplexity");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", result.perplexity);
    out += std::string(buf);
    if (result.zero_position) {
        out += "\tzero_at\t" + std::to_string(*result.zero_position);
    }
    out += "\n";
    write_output(common.output, out);
}

}  // namespace

namespace {

// every option value the subcommands bind to; kept together so the app can
// also be built without parsing (help completeness check)
struct AppState {
    Common common;
    std::string cells, table_path;
    std::size_t rows = 0, cols = 0;
    std::string colloc_file, colloc_method = "g2";
    std::size_t colloc_top = 0;
    bool line_delimited = false;
    std::string zipf_file;
    std::string train_label;
    std::vector<std::string> train_files;
    int train_order = 3;
    bool fold = false;
    std::vector<std::string> classify_models;
    std::string classify_input = "-";
    double classify_alpha = 0.2;
    std::vector<std::string> suite_labels, suite_files;
    std::string eval_suite_path, eval_orders = "0,1,2,3";
    double eval_alpha = 0.2;
    std::string rel_dir, nonrel_dir;
    double threshold = 20.0;
    bool count_docs = false;
    std::string query_path;
    std::vector<std::string> rank_docs;
    std::string kt_target, kt_reference;
    double kt_threshold = 20.0;
    std::string fasta, boundaries, positions_spec = "-30..29";
    int replicates = 200;
    std::int64_t pc_left = 0, pc_right = 0;
    std::string left_spec, right_spec, cdf_out;
    double identity = 0.95;
    int nmer = 8;
    std::string removed_out;
    std::string mm_corpus, mm_vocab, mm_model, mm_text;
    double mm_epsilon = 0.0;
    int qb_order = 3;
    double qb_alpha = 1.0;
    bool qb_adaptive = false;
};

void build_app(CLI::App& app, AppState& s) {
    app.description("surprise: log-likelihood-ratio analysis of symbolic sequences");
    app.require_subcommand(1);
    Common& common = s.common;

    auto* g2cmd = app.add_subcommand("g2", "G^2 independence test of a contingency table");
    g2cmd->add_option("--cells", s.cells, "row-major cell counts, e.g. \"110 2442 111 29114\"");
    g2cmd->add_option("--table", s.table_path, "TSV file of integer rows");
    g2cmd->add_option("--rows", s.rows, "row count for --cells (default 2 when 4 cells)");
    g2cmd->add_option("--cols", s.cols, "column count for --cells");
    add_common(g2cmd, common);
    g2cmd->callback([&] { cmd_table_test(common, s.cells, s.table_path, s.rows, s.cols, false); });

    auto* chi2cmd = app.add_subcommand("chi2", "Pearson chi-squared test of a contingency table");
    chi2cmd->add_option("--cells", s.cells, "row-major cell counts");
    chi2cmd->add_option("--table", s.table_path, "TSV file of integer rows");
    chi2cmd->add_option("--rows", s.rows, "row count for --cells");
    chi2cmd->add_option("--cols", s.cols, "column count for --cells");
    add_common(chi2cmd, common);
    chi2cmd->callback([&] { cmd_table_test(common, s.cells, s.table_path, s.rows, s.cols, true); });

    auto* colloc = app.add_subcommand("colloc", "collocation analysis");
    colloc->require_subcommand(1);
    auto* colloc_rank = colloc->add_subcommand("rank", "rank adjacent bigrams by G^2 or chi^2");
    colloc_rank->add_option("file", s.colloc_file, "input text file")->required();
    colloc_rank->add_option("--method", s.colloc_method, "g2 or pearson")
        ->check(CLI::IsMember({"g2", "pearson"}));
    colloc_rank->add_option("--top", s.colloc_top, "keep only the top N bigrams");
    colloc_rank->add_flag("--line-delimited", s.line_delimited,
                          "adjacent pairs do not cross line breaks");
    add_common(colloc_rank, common);
    colloc_rank->callback([&] {
        cmd_colloc_rank(common, s.colloc_file, s.colloc_method, s.colloc_top, s.line_delimited);
    });

    auto* colloc_zipf = colloc->add_subcommand("zipf", "frequency-of-frequencies profile");
    colloc_zipf->add_option("file", s.colloc_file, "input text file")->required();
    add_common(colloc_zipf, common);
    colloc_zipf->callback([&] { cmd_zipf(common, s.colloc_file); });

    auto* zipf_cmd = app.add_subcommand("zipf", "frequency-of-frequencies profile");
    zipf_cmd->add_option("file", s.zipf_file, "input text file")->required();
    add_common(zipf_cmd, common);
    zipf_cmd->callback([&] { cmd_zipf(common, s.zipf_file); });

    auto* langid = app.add_subcommand("langid", "byte n-gram source identification");
    langid->require_subcommand(1);

    auto* lt = langid->add_subcommand("train", "build a category model from text files");
    lt->add_option("--label", s.train_label, "category label")->required();
    lt->add_option("files", s.train_files, "training text files")->required();
    lt->add_option("--order", s.train_order, "Markov order k");
    lt->add_flag("--fold-case", s.fold, "lowercase before counting (off by default)");
    add_common(lt, common);
    lt->callback([&] {
        cmd_langid_train(common, s.train_label, s.train_files, s.train_order, s.fold);
    });

    auto* lc = langid->add_subcommand("classify", "classify text against category models");
    lc->add_option("models", s.classify_models, "model JSON files")->required();
    lc->add_option("--input", s.classify_input, "text file ('-' = stdin)");
    lc->add_option("--alpha", s.classify_alpha, "test-side weight in the composite model");
    add_common(lc, common);
    lc->callback([&] {
        cmd_langid_classify(common, s.classify_models, s.classify_input, s.classify_alpha);
    });

    auto* ls = langid->add_subcommand("suite", "sample a training/test evaluation suite");
    // one value per --label occurrence, so the positional files stay separate
    ls->add_option("--label", s.suite_labels, "label (repeat per corpus)")
        ->required()
        ->take_all()
        ->allow_extra_args(false)
        ->type_size(1);
    ls->add_option("files", s.suite_files, "corpus file per label")->required();
    add_common(ls, common);
    ls->callback([&] { cmd_langid_suite(common, s.suite_labels, s.suite_files); });

    auto* le = langid->add_subcommand("eval", "error-rate grid over an evaluation suite");
    le->add_option("--suite", s.eval_suite_path, "suite JSON from 'langid suite'")->required();
    le->add_option("--orders", s.eval_orders, "comma-separated Markov orders");
    le->add_option("--alpha", s.eval_alpha, "test-side weight");
    add_common(le, common);
    le->callback([&] { cmd_langid_eval(common, s.eval_suite_path, s.eval_orders, s.eval_alpha); });

    auto* route = app.add_subcommand("route", "routing-query term selection and ranking");
    route->require_subcommand(1);

    auto* rs = route->add_subcommand("select", "select query terms from judged documents");
    rs->add_option("--rel", s.rel_dir, "directory of judged relevant documents")->required();
    rs->add_option("--nonrel", s.nonrel_dir, "directory of judged non-relevant documents")
        ->required();
    rs->add_option("--threshold", s.threshold, "minimum G^2 (20 ~ p 1e-5)");
    rs->add_flag("--count-docs", s.count_docs,
                 "count documents containing a term instead of raw frequency");
    add_common(rs, common);
    rs->callback([&] {
        cmd_route_select(common, s.rel_dir, s.nonrel_dir, s.threshold, s.count_docs);
    });

    auto* rr = route->add_subcommand("rank", "rank documents against a selected query");
    rr->add_option("--query", s.query_path, "query TSV (route select output)")->required();
    rr->add_option("documents", s.rank_docs, "document files")->required();
    add_common(rr, common);
    rr->callback([&] { cmd_route_rank(common, s.query_path, s.rank_docs); });

    auto* kt = app.add_subcommand("keyterms", "terms over-represented in a target corpus");
    kt->add_option("target", s.kt_target, "target file or directory")->required();
    kt->add_option("reference", s.kt_reference, "reference file or directory")->required();
    kt->add_option("--threshold", s.kt_threshold, "minimum G^2");
    add_common(kt, common);
    kt->callback([&] { cmd_keyterms(common, s.kt_target, s.kt_reference, s.kt_threshold); });

    auto* pi = app.add_subcommand("posinfo", "positional information content with bootstrap bars");
    pi->add_option("--fasta", s.fasta, "FASTA input ('|' marks the boundary)")->required();
    pi->add_option("--boundaries", s.boundaries, "sidecar TSV (id, boundary_offset)");
    pi->add_option("--positions", s.positions_spec,
                   "positions, e.g. \"-30..29\" or \"-3,-2,-1\"");
    pi->add_option("--replicates", s.replicates, "bootstrap replicates");
    add_common(pi, common);
    pi->callback([&] {
        cmd_posinfo(common, s.fasta, s.boundaries, s.positions_spec, s.replicates);
    });

    auto* pc = app.add_subcommand("paircorr", "position-pair contingency table and G^2");
    pc->add_option("--fasta", s.fasta, "FASTA input")->required();
    pc->add_option("--boundaries", s.boundaries, "sidecar TSV (id, boundary_offset)");
    pc->add_option("--left", s.pc_left, "left position (negative = left of boundary)")
        ->required();
    pc->add_option("--right", s.pc_right, "right position")->required();
    add_common(pc, common);
    pc->callback([&] { cmd_paircorr(common, s.fasta, s.boundaries, s.pc_left, s.pc_right); });

    auto* st = app.add_subcommand("structure", "region pair-correlation versus chi^2(9)");
    st->add_option("--fasta", s.fasta, "FASTA input")->required();
    st->add_option("--boundaries", s.boundaries, "sidecar TSV (id, boundary_offset)");
    st->add_option("--left", s.left_spec, "left region, e.g. \"-15..-1\"")->required();
    st->add_option("--right", s.right_spec, "right region, e.g. \"0..14\"")->required();
    st->add_option("--cdf-out", s.cdf_out, "also write (x, ecdf, chi2_cdf) rows here");
    add_common(st, common);
    st->callback([&] {
        cmd_structure(common, s.fasta, s.boundaries, s.left_spec, s.right_spec, s.cdf_out);
    });

    auto* dd = app.add_subcommand("dedup", "remove near-duplicate sequences");
    dd->add_option("--fasta", s.fasta, "FASTA input")->required();
    dd->add_option("--identity", s.identity, "identity threshold (default 0.95)");
    dd->add_option("--nmer", s.nmer, "n-mer length for the signature screen");
    dd->add_option("--removed", s.removed_out, "write removed ids here");
    add_common(dd, common);
    dd->callback([&] { cmd_dedup(common, s.fasta, s.removed_out, s.identity, s.nmer); });

    auto* mm = app.add_subcommand("mm", "mixed-order Markov models");
    mm->require_subcommand(1);

    auto* mg = mm->add_subcommand("grow", "grow a mixed-order model greedily");
    mg->add_option("corpus", s.mm_corpus, "training text")->required();
    auto* eps_opt = mg->add_option("--epsilon", s.mm_epsilon,
                                   "over-fitting knob (default: chi^2 critical at 1e-3)");
    mg->add_option("--vocab", s.mm_vocab, "token mode with this vocabulary file");
    add_common(mg, common);
    mg->callback([&, eps_opt] {
        cmd_mm_grow(common, s.mm_corpus, s.mm_epsilon, eps_opt->count() > 0, s.mm_vocab);
    });

    auto* mq = mm->add_subcommand("qb", "quasi-Bayesian smoothed model");
    mq->add_option("corpus", s.mm_corpus, "training text")->required();
    mq->add_option("--order", s.qb_order, "maximum Markov order");
    mq->add_option("--alpha", s.qb_alpha, "fixed smoothing weight alpha (w = alpha |Sigma|)");
    mq->add_flag("--adaptive", s.qb_adaptive, "perplexity-adaptive weight e^H instead of fixed");
    mq->add_option("--vocab", s.mm_vocab, "token mode with this vocabulary file");
    add_common(mq, common);
    mq->callback([&] {
        cmd_mm_qb(common, s.mm_corpus, s.qb_order, s.qb_alpha, s.qb_adaptive, s.mm_vocab);
    });

    auto* mp = mm->add_subcommand("perplexity", "per-symbol perplexity of text under a model");
    mp->add_option("model", s.mm_model, "model JSON from 'mm grow' or 'mm qb'")->required();
    mp->add_option("text", s.mm_text, "text file")->required();
    add_common(mp, common);
    mp->callback([&] { cmd_mm_perplexity(common, s.mm_model, s.mm_text); });
}

void collect_help_gaps(const CLI::App* app, const std::string& path,
                       std::vector<std::string>& gaps) {
    const std::string help = const_cast<CLI::App*>(app)->help();
    for (const CLI::Option* opt : app->get_options()) {
        const std::string name = opt->get_name();
        if (name.empty()) continue;
        if (help.find(name) == std::string::npos) {
            gaps.push_back(path + " " + name);
        }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
        collect_help_gaps(sub, path + " " + sub->get_name(), gaps);
    }
}

}  // namespace

std::vector<std::string> cli_help_gaps() {
    AppState state;
    CLI::App app;
    build_app(app, state);
    std::vector<std::string> gaps;
    collect_help_gaps(&app, "surprise", gaps);
    return gaps;
}

int run_cli(int argc, const char* const* argv) {
    AppState state;
    for (int i = 1; i < argc; ++i) state.common.raw_args.emplace_back(argv[i]);
    CLI::App app;
    build_app(app, state);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace surprise
