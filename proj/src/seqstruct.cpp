#include "surprise/seqstruct.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "surprise/classify.hpp"
#include "surprise/parallel.hpp"
#include "surprise/rng.hpp"
#include "surprise/special.hpp"

namespace surprise {

namespace {

std::size_t residue_index(const std::string& alphabet, char c) {
    const std::size_t idx = alphabet.find(c);
    if (idx == std::string::npos) {
        throw std::invalid_argument(std::string("unexpected residue '") + c + "'");
    }
    return idx;
}

}  // namespace

std::vector<SequenceRecord> parse_fasta(const std::string& text, const std::string& alphabet) {
    std::vector<SequenceRecord> records;
    std::istringstream in(text);
    std::string line;
    SequenceRecord current;
    bool have_record = false;
    const auto flush = [&]() {
        if (have_record) {
            if (current.residues.empty()) {
                throw std::invalid_argument("fasta: record " + current.id + " is empty");
            }
            records.push_back(std::move(current));
        }
        current = SequenceRecord{};
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            flush();
            have_record = true;
            const std::size_t sp = line.find_first_of(" \t");
            current.id = line.substr(1, sp == std::string::npos ? std::string::npos : sp - 1);
            if (current.id.empty()) throw std::invalid_argument("fasta: empty record id");
            continue;
        }
        if (!have_record) throw std::invalid_argument("fasta: sequence before first header");
        for (char c : line) {
            if (c == '|') {
                if (current.boundary) {
                    throw std::invalid_argument("fasta: record " + current.id +
                                                " has two boundary markers");
                }
                current.boundary = static_cast<std::int64_t>(current.residues.size());
                continue;
            }
            const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            residue_index(alphabet, up);   // validates
            current.residues.push_back(up);
        }
    }
    flush();
    return records;
}

void apply_boundary_tsv(std::vector<SequenceRecord>& records, const std::string& tsv) {
    std::unordered_map<std::string, std::int64_t> boundaries;
    std::istringstream in(tsv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string id;
        std::int64_t offset;
        if (!(ls >> id >> offset)) throw std::invalid_argument("boundary tsv: bad line: " + line);
        boundaries[id] = offset;
    }
    for (auto& r : records) {
        const auto it = boundaries.find(r.id);
        if (it == boundaries.end()) continue;
        if (it->second < 0 || it->second > static_cast<std::int64_t>(r.residues.size())) {
            throw std::invalid_argument("boundary tsv: offset out of range for " + r.id);
        }
        r.boundary = it->second;
    }
}

double information_bits(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("information_bits: empty distribution");
    double sum = 0.0, h = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("information_bits: negative probability");
        sum += p;
        if (p > 0.0) h -= p * std::log2(p);
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("information_bits: probabilities must sum to 1");
    }
    return std::log2(static_cast<double>(probs.size())) - h;
}

std::vector<PositionInfo> positional_information(const std::vector<SequenceRecord>& records,
                                                 std::span<const std::int64_t> positions,
                                                 int bootstrap_replicates, std::uint64_t seed,
                                                 const std::string& alphabet) {
    std::vector<PositionInfo> out;
    for (std::int64_t pos : positions) {
        std::vector<std::size_t> bases;   // residue index per covering record
        for (const auto& r : records) {
            if (r.covers(pos)) bases.push_back(residue_index(alphabet, r.at(pos)));
        }
        if (bases.size() < 2) {
            throw std::invalid_argument("positional_information: position " +
                                        std::to_string(pos) + " covered by fewer than 2 records");
        }
        const auto info_of = [&](std::span<const std::size_t> idx) {
            std::vector<double> freq(alphabet.size(), 0.0);
            for (std::size_t i : idx) freq[bases[i]] += 1.0;
            for (double& f : freq) f /= static_cast<double>(idx.size());
            return information_bits(freq);
        };
        std::vector<std::size_t> all(bases.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

        PositionInfo pi;
        pi.position = pos;
        pi.bits = info_of(all);
        pi.n_records = static_cast<std::int64_t>(bases.size());
        const Band band = bootstrap_band_stat(bases.size(), bootstrap_replicates,
                                              seed ^ static_cast<std::uint64_t>(pos * 2654435761ll),
                                              info_of);
        pi.low = band.low;
        pi.high = band.high;
        out.push_back(pi);
    }
    return out;
}

std::pair<PositionPairTable, TestResult> pair_correlation(
    const std::vector<SequenceRecord>& records, std::int64_t pos_left, std::int64_t pos_right,
    const std::string& alphabet) {
    const std::size_t m = alphabet.size();
    std::vector<std::int64_t> cells(m * m, 0);
    std::int64_t n = 0;
    for (const auto& r : records) {
        if (!r.covers(pos_left) || !r.covers(pos_right)) continue;
        ++cells[residue_index(alphabet, r.at(pos_left)) * m +
                residue_index(alphabet, r.at(pos_right))];
        ++n;
    }
    if (n == 0) {
        throw std::invalid_argument("pair_correlation: no record covers both positions");
    }
    PositionPairTable ppt{pos_left, pos_right, ContingencyTable(m, m, std::move(cells)), n};
    const TestResult res = g2_test(ppt.table);
    return {std::move(ppt), res};
}

StructureReport region_structure(const std::vector<SequenceRecord>& records,
                                 std::span<const std::int64_t> left_region,
                                 std::span<const std::int64_t> right_region,
                                 const std::string& alphabet) {
    if (left_region.empty() || right_region.empty()) {
        throw std::invalid_argument("region_structure: empty region");
    }
    struct Slot {
        PairScore score;
        bool degenerate = false;
    };
    std::vector<std::pair<std::int64_t, std::int64_t>> grid;
    for (std::int64_t l : left_region) {
        for (std::int64_t r : right_region) grid.emplace_back(l, r);
    }
    std::vector<Slot> slots(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const auto [l, r] = grid[i];
        try {
            const auto [table, res] = pair_correlation(records, l, r, alphabet);
            slots[i].score = PairScore{l, r, res.statistic, res.p_value};
        } catch (const std::invalid_argument&) {
            slots[i].score = PairScore{l, r, 0.0, 1.0};
            slots[i].degenerate = true;
        }
    });

    StructureReport report;
    for (const auto& s : slots) {
        if (s.degenerate) {
            report.skipped_degenerate.emplace_back(s.score.pos_left, s.score.pos_right);
        } else {
            report.pairs.push_back(s.score);
            report.sorted_g2.push_back(s.score.g2);
        }
    }
    if (report.sorted_g2.empty()) {
        throw std::invalid_argument("region_structure: every pair table was degenerate");
    }
    std::sort(report.sorted_g2.begin(), report.sorted_g2.end());
    const std::size_t n = report.sorted_g2.size();
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = chi2_cdf(report.sorted_g2[i], 9);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        ks = std::max(ks, std::max(std::fabs(f - lo), std::fabs(hi - f)));
    }
    report.ks_distance = ks;
    report.ks_p_value = kolmogorov_sf(ks, n);
    return report;
}

std::vector<SequenceRecord> shuffled_control(const std::vector<SequenceRecord>& records,
                                             std::uint64_t seed) {
    for (const auto& r : records) {
        if (!r.boundary) {
            throw std::invalid_argument("shuffled_control: record " + r.id + " has no boundary");
        }
    }
    Rng rng(seed);
    const std::vector<std::size_t> perm = rng.permutation(records.size());
    std::vector<SequenceRecord> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& left_src = records[i];
        const auto& right_src = records[perm[i]];
        SequenceRecord r;
        r.id = left_src.id;
        r.residues = left_src.residues.substr(0, static_cast<std::size_t>(*left_src.boundary)) +
                     right_src.residues.substr(static_cast<std::size_t>(*right_src.boundary));
        r.boundary = left_src.boundary;
        out.push_back(std::move(r));
    }
    return out;
}

std::int64_t edit_distance(std::string_view a, std::string_view b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0) return static_cast<std::int64_t>(m);
    if (m == 0) return static_cast<std::int64_t>(n);
    std::vector<std::int64_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<std::int64_t>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<std::int64_t>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const std::int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

namespace {

constexpr std::size_t kSignatureBits = 4096;
using Signature = std::array<std::uint64_t, kSignatureBits / 64>;

Signature nmer_signature(std::string_view s, int nmer) {
    Signature sig{};
    if (s.size() < static_cast<std::size_t>(nmer)) return sig;
    for (std::size_t i = 0; i + nmer <= s.size(); ++i) {
        // FNV-1a over the window
        std::uint64_t h = 1469598103934665603ull;
        for (int j = 0; j < nmer; ++j) {
            h ^= static_cast<unsigned char>(s[i + j]);
            h *= 1099511628211ull;
        }
        const std::size_t bit = h % kSignatureBits;
        sig[bit / 64] |= 1ull << (bit % 64);
    }
    return sig;
}

std::int64_t unshared_bits(const Signature& a, const Signature& b) {
    std::int64_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        n += std::popcount(a[i] & ~b[i]);
    }
    return n;
}

}  // namespace

std::int64_t signature_distance_bound(std::string_view a, std::string_view b, int nmer) {
    if (nmer < 1) throw std::invalid_argument("signature_distance_bound: nmer must be >= 1");
    const Signature sa = nmer_signature(a, nmer);
    const Signature sb = nmer_signature(b, nmer);
    const std::int64_t one_sided = std::max(unshared_bits(sa, sb), unshared_bits(sb, sa));
    const std::int64_t from_nmers =
        (one_sided + static_cast<std::int64_t>(nmer) - 1) / static_cast<std::int64_t>(nmer);
    const std::int64_t from_length = std::llabs(static_cast<long long>(a.size()) -
                                                static_cast<long long>(b.size()));
    return std::max(from_nmers, from_length);
}

DedupResult dedup(const std::vector<SequenceRecord>& records, double identity, int nmer) {
    if (!(identity > 0.0 && identity <= 1.0)) {
        throw std::invalid_argument("dedup: identity must be in (0, 1]");
    }
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (records[x].residues.size() != records[y].residues.size()) {
            return records[x].residues.size() < records[y].residues.size();
        }
        return records[x].id < records[y].id;
    });

    DedupResult result;
    std::vector<Signature> kept_sigs;
    for (std::size_t oi : order) {
        const auto& rec = records[oi];
        const Signature sig = nmer_signature(rec.residues, nmer);
        const double len = static_cast<double>(rec.residues.size());
        bool duplicate = false;
        for (std::size_t ki = 0; ki < result.kept.size(); ++ki) {
            const auto& kept = result.kept[ki];
            const double klen = static_cast<double>(kept.residues.size());
            if (klen / len < identity) continue;   // not approximately the same length
            // the signature bound can rule out 95% identity without alignment
            const std::int64_t allowed =
                static_cast<std::int64_t>(std::floor((1.0 - identity) * len));
            const std::int64_t bound =
                (unshared_bits(sig, kept_sigs[ki]) + nmer - 1) / nmer;
            if (bound > allowed) continue;
            const std::int64_t d = edit_distance(rec.residues, kept.residues);
            if (1.0 - static_cast<double>(d) / len >= identity) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) {
            result.removed_ids.push_back(rec.id);
        } else {
            result.kept.push_back(rec);
            kept_sigs.push_back(sig);
        }
    }
    std::sort(result.removed_ids.begin(), result.removed_ids.end());
    return result;
}

}  // namespace surprise
