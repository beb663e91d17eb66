#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surprise/tables.hpp"

namespace surprise {

/// One aligned sequence with an optional boundary splitting left/right
/// flanks.  Position 0 is the first residue right of the boundary, -1 the
/// first residue to its left.
struct SequenceRecord {
    std::string id;
    std::string residues;                 // over {A,C,G,T} by default
    std::optional<std::int64_t> boundary; // index of the first right-flank residue

    bool covers(std::int64_t pos) const {
        if (!boundary) return false;
        const std::int64_t idx = *boundary + pos;
        return idx >= 0 && idx < static_cast<std::int64_t>(residues.size());
    }
    char at(std::int64_t pos) const { return residues[static_cast<std::size_t>(*boundary + pos)]; }
};

// FASTA with optional '|' boundary markers inside sequences; boundaries can
// also come from a sidecar TSV of (id, boundary_offset) lines.
std::vector<SequenceRecord> parse_fasta(const std::string& text,
                                        const std::string& alphabet = "ACGT");
void apply_boundary_tsv(std::vector<SequenceRecord>& records, const std::string& tsv);

// Information content of a probability vector against the uniform baseline,
// in bits: log2(|probs|) - H(probs).
double information_bits(std::span<const double> probs);

struct PositionInfo {
    std::int64_t position = 0;
    double bits = 0.0;
    double low = 0.0;     // percentile bootstrap band
    double high = 0.0;
    std::int64_t n_records = 0;
};

// Per-position information content with bootstrap error bars over resampled
// record sets.  Records that do not cover a position are skipped and the
// contributing count reported.
std::vector<PositionInfo> positional_information(const std::vector<SequenceRecord>& records,
                                                 std::span<const std::int64_t> positions,
                                                 int bootstrap_replicates, std::uint64_t seed,
                                                 const std::string& alphabet = "ACGT");

struct PositionPairTable {
    std::int64_t pos_left = 0;
    std::int64_t pos_right = 0;
    ContingencyTable table;       // |alphabet| x |alphabet| counts
    std::int64_t n_records = 0;
};

// 4x4 contingency table over records covering both positions, with its G^2
// (df 9 for a full 4x4).  Degenerate margins propagate as errors rather than
// being silently collapsed.
std::pair<PositionPairTable, TestResult> pair_correlation(
    const std::vector<SequenceRecord>& records, std::int64_t pos_left, std::int64_t pos_right,
    const std::string& alphabet = "ACGT");

struct PairScore {
    std::int64_t pos_left = 0;
    std::int64_t pos_right = 0;
    double g2 = 0.0;
    double p_value = 1.0;
};

struct StructureReport {
    std::vector<PairScore> pairs;
    std::vector<double> sorted_g2;                       // the empirical distribution
    double ks_distance = 0.0;                            // sup |ECDF - chi2(9) CDF|
    double ks_p_value = 1.0;
    std::vector<std::pair<std::int64_t, std::int64_t>> skipped_degenerate;
    std::string left_label = "L";
    std::string right_label = "R";
};

// All |L| x |R| pair scores plus the Kolmogorov-Smirnov distance between
// their empirical CDF and the chi^2(9) reference; the distance doubles as a
// descriptive measure of structure, so the test p-value is reported next to
// it rather than instead of it.
StructureReport region_structure(const std::vector<SequenceRecord>& records,
                                 std::span<const std::int64_t> left_region,
                                 std::span<const std::int64_t> right_region,
                                 const std::string& alphabet = "ACGT");

// Control: right halves permuted uniformly at random across records, left
// halves fixed.  Per-position marginals are exactly preserved.
std::vector<SequenceRecord> shuffled_control(const std::vector<SequenceRecord>& records,
                                             std::uint64_t seed);

// Unit-cost Levenshtein distance; the oracle for the signature lower bound.
std::int64_t edit_distance(std::string_view a, std::string_view b);

// Conservative lower bound on edit_distance(a, b) from fixed-width bit tables
// of hashed n-mers: each edit destroys at most n distinct n-mers, and hash
// collisions only lower the bound.
std::int64_t signature_distance_bound(std::string_view a, std::string_view b, int nmer = 8);

struct DedupResult {
    std::vector<SequenceRecord> kept;
    std::vector<std::string> removed_ids;
};

// Removes every record that is at least `identity` identical (1 - d/longer
// length) to a shorter kept record of approximately the same length (length
// ratio >= identity).  The bit-signature screen rejects most pairs without
// running the quadratic alignment.  Idempotent.
DedupResult dedup(const std::vector<SequenceRecord>& records, double identity = 0.95,
                  int nmer = 8);

}  // namespace surprise
