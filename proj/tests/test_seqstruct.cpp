#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "surprise/rng.hpp"
#include "surprise/seqstruct.hpp"
#include "surprise/special.hpp"

using namespace surprise;

namespace {

const char kBases[] = "ACGT";

std::vector<SequenceRecord> random_records(Rng& rng, int n, int left, int right) {
    std::vector<SequenceRecord> records;
    for (int i = 0; i < n; ++i) {
        SequenceRecord r;
        r.id = "r" + std::to_string(i);
        for (int j = 0; j < left + right; ++j) r.residues.push_back(kBases[rng.bounded(4)]);
        r.boundary = left;
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

TEST_CASE("fasta parsing with boundary markers") {
    const auto records = parse_fasta(">a desc\nACG|TACGT\n>b\nGG\nTT\n");
    REQUIRE(records.size() == 2);
    CHECK(records[0].id == "a");
    CHECK(records[0].residues == "ACGTACGT");
    CHECK(records[0].boundary == 3);
    CHECK(records[1].residues == "GGTT");
    CHECK_FALSE(records[1].boundary.has_value());

    CHECK_THROWS_AS(parse_fasta("ACGT\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_fasta(">x\nACGN\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_fasta(">x\nA|C|G\n"), std::invalid_argument);

    // sidecar boundaries
    auto rec2 = parse_fasta(">a\nACGT\n");
    apply_boundary_tsv(rec2, "a\t2\n");
    CHECK(rec2[0].boundary == 2);
    CHECK(rec2[0].at(0) == 'G');
    CHECK(rec2[0].at(-1) == 'C');
    CHECK_THROWS_AS(apply_boundary_tsv(rec2, "a\t9\n"), std::invalid_argument);
}

TEST_CASE("information content of distributions") {
    CHECK(information_bits(std::vector<double>{1.0, 0.0, 0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(information_bits(std::vector<double>{0.25, 0.25, 0.25, 0.25}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // the worked marginal: {0.23, 0.24, 0.31, 0.22} carries ~0.0138 bits
    CHECK(information_bits(std::vector<double>{0.23, 0.24, 0.31, 0.22}) ==
          doctest::Approx(0.0138).epsilon(0.0005 / 0.0138));
    CHECK_THROWS_AS(information_bits(std::vector<double>{0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("positional information: conserved and uniform positions") {
    Rng rng(7);
    auto records = random_records(rng, 300, 5, 5);
    for (auto& r : records) r.residues[5] = 'G';   // position 0 fully conserved

    const std::vector<std::int64_t> positions{-1, 0};
    const auto info = positional_information(records, positions, 200, 42);
    REQUIRE(info.size() == 2);
    // uniform position: near zero bits
    CHECK(info[0].bits < 0.05);
    // conserved position: exactly 2 bits with a zero-width band
    CHECK(info[1].bits == doctest::Approx(2.0));
    CHECK(info[1].low == doctest::Approx(2.0));
    CHECK(info[1].high == doctest::Approx(2.0));
    CHECK(info[1].n_records == 300);

    const std::vector<std::int64_t> uncovered{40};
    CHECK_THROWS_AS(positional_information(records, uncovered, 10, 1), std::invalid_argument);
}

TEST_CASE("bootstrap bands shrink roughly as 1/sqrt(n)") {
    // skewed base composition keeps the information statistic away from its
    // boundary at 0, where the 1/sqrt(n) regime does not apply
    Rng rng(11);
    const auto skewed_records = [&](int n) {
        std::vector<SequenceRecord> records;
        for (int i = 0; i < n; ++i) {
            SequenceRecord r;
            r.id = "r" + std::to_string(i);
            for (int j = 0; j < 4; ++j) {
                const double u = rng.uniform();
                r.residues.push_back(u < 0.4 ? 'A' : (u < 0.7 ? 'C' : (u < 0.9 ? 'G' : 'T')));
            }
            r.boundary = 2;
            records.push_back(std::move(r));
        }
        return records;
    };
    const auto width_at = [&](int n, std::uint64_t seed) {
        const auto records = skewed_records(n);
        const std::vector<std::int64_t> positions{0};
        const auto info = positional_information(records, positions, 400, seed);
        return info[0].high - info[0].low;
    };
    // average over independent datasets; a single ratio is too noisy
    double w100 = 0.0, w400 = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
        w100 += width_at(100, 100 + r);
        w400 += width_at(400, 500 + r);
    }
    const double ratio = w100 / w400;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
}

TEST_CASE("pair correlation reproduces the reference 4x4 table") {
    // the published human intron table, rebuilt as records with one pair each
    const std::int64_t cells[4][4] = {{212, 224, 298, 188},
                                      {238, 267, 421, 139},
                                      {134, 85, 180, 104},
                                      {82, 64, 122, 39}};
    std::vector<SequenceRecord> records;
    int id = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            for (std::int64_t c = 0; c < cells[i][j]; ++c) {
                SequenceRecord r;
                r.id = "p" + std::to_string(id++);
                r.residues = std::string(1, kBases[i]) + std::string(1, kBases[j]);
                r.boundary = 1;
                records.push_back(std::move(r));
            }
        }
    }
    const auto [table, result] = pair_correlation(records, -1, 0);
    CHECK(table.n_records == 2797);
    CHECK(result.statistic == doctest::Approx(48.03).epsilon(0.05 / 48.03));
    CHECK(result.df == 9);
    // the same table carries about 0.01 bits of average mutual information
    CHECK(mutual_information(table.table, 2.0) == doctest::Approx(0.01).epsilon(0.5));
}

TEST_CASE("independent positions give chi2(9)-consistent scores") {
    Rng rng(13);
    const auto records = random_records(rng, 2000, 8, 8);
    std::vector<std::int64_t> left, right;
    for (std::int64_t p = -8; p < 0; ++p) left.push_back(p);
    for (std::int64_t p = 0; p < 8; ++p) right.push_back(p);
    const auto report = region_structure(records, left, right);
    CHECK(report.pairs.size() == 64);
    CHECK(report.skipped_degenerate.empty());
    const double crit = kolmogorov_critical(0.01, report.sorted_g2.size());
    CHECK(report.ks_distance < crit);

    // product table sanity: a single fabricated independent pair scores ~0
    std::vector<SequenceRecord> prod;
    int id = 0;
    for (char a : std::string("ACGT")) {
        for (char b : std::string("ACGT")) {
            for (int c = 0; c < 10; ++c) {
                SequenceRecord r;
                r.id = "q" + std::to_string(id++);
                r.residues = std::string(1, a) + std::string(1, b);
                r.boundary = 1;
                prod.push_back(std::move(r));
            }
        }
    }
    const auto [t0, r0] = pair_correlation(prod, -1, 0);
    CHECK(r0.statistic == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("perfectly dependent halves produce a KS distance near 1") {
    // single-base records: every position pair is fully dependent, every
    // pair's g2 is enormous, so the ECDF sits far right of chi2(9)
    Rng rng(17);
    std::vector<SequenceRecord> records;
    for (int i = 0; i < 500; ++i) {
        SequenceRecord r;
        r.id = "c" + std::to_string(i);
        r.residues = std::string(12, kBases[rng.bounded(4)]);
        r.boundary = 6;
        records.push_back(std::move(r));
    }
    std::vector<std::int64_t> left, right;
    for (std::int64_t p = -6; p < 0; ++p) left.push_back(p);
    for (std::int64_t p = 0; p < 6; ++p) right.push_back(p);
    const auto report = region_structure(records, left, right);
    CHECK(report.ks_distance > 0.9);
    CHECK(report.ks_p_value < 1e-6);
}

TEST_CASE("single-pair regions give a one-step CDF") {
    Rng rng(19);
    const auto records = random_records(rng, 400, 3, 3);
    const std::vector<std::int64_t> left{-1}, right{0};
    const auto report = region_structure(records, left, right);
    CHECK(report.pairs.size() == 1);
    CHECK(report.sorted_g2.size() == 1);
}

TEST_CASE("shuffled control preserves marginals and kills structure") {
    Rng rng(23);
    // dependent data: 20% of records copy a fixed template on both halves,
    // which correlates every left position with every right position
    std::string templ;
    for (int j = 0; j < 10; ++j) templ.push_back(kBases[rng.bounded(4)]);
    std::vector<SequenceRecord> records;
    for (int i = 0; i < 800; ++i) {
        SequenceRecord r;
        r.id = "s" + std::to_string(i);
        if (rng.uniform() < 0.2) {
            r.residues = templ;
        } else {
            for (int j = 0; j < 10; ++j) r.residues.push_back(kBases[rng.bounded(4)]);
        }
        r.boundary = 5;
        records.push_back(std::move(r));
    }
    const auto shuffled = shuffled_control(records, 99);
    REQUIRE(shuffled.size() == records.size());

    // per-position marginals are exactly preserved
    for (std::int64_t pos : {-5, -1, 0, 4}) {
        std::map<char, int> before, after;
        for (const auto& r : records) ++before[r.at(pos)];
        for (const auto& r : shuffled) ++after[r.at(pos)];
        CHECK(before == after);
    }

    std::vector<std::int64_t> left{-5, -4, -3, -2, -1}, right{0, 1, 2, 3, 4};
    const auto dependent = region_structure(records, left, right);
    const auto control = region_structure(shuffled, left, right);
    CHECK(dependent.ks_distance > 0.5);
    const double crit = kolmogorov_critical(0.01, control.sorted_g2.size());
    CHECK(control.ks_distance < crit);

    // n = 1 is unchanged
    const std::vector<SequenceRecord> one{records[0]};
    const auto same = shuffled_control(one, 5);
    CHECK(same[0].residues == records[0].residues);
}

TEST_CASE("edit distance basics") {
    CHECK(edit_distance("", "") == 0);
    CHECK(edit_distance("ACGT", "ACGT") == 0);
    CHECK(edit_distance("ACGT", "AGGT") == 1);
    CHECK(edit_distance("ACGT", "") == 4);
    CHECK(edit_distance("kitten", "sitting") == 3);
}

TEST_CASE("signature bound never exceeds the true edit distance") {
    Rng rng(29);
    for (int trial = 0; trial < 10000; ++trial) {
        const int la = 20 + static_cast<int>(rng.bounded(60));
        const int lb = 20 + static_cast<int>(rng.bounded(60));
        std::string a, b;
        for (int i = 0; i < la; ++i) a.push_back(kBases[rng.bounded(4)]);
        // half the trials: b is a mutated copy of a, else independent
        if (trial % 2 == 0) {
            b = a;
            const int edits = static_cast<int>(rng.bounded(6));
            for (int e = 0; e < edits && !b.empty(); ++e) {
                b[rng.bounded(b.size())] = kBases[rng.bounded(4)];
            }
        } else {
            for (int i = 0; i < lb; ++i) b.push_back(kBases[rng.bounded(4)]);
        }
        CHECK(signature_distance_bound(a, b) <= edit_distance(a, b));
    }
}

TEST_CASE("dedup removes exact and near duplicates, keeps unrelated pairs") {
    Rng rng(31);
    std::string base;
    for (int i = 0; i < 1000; ++i) base.push_back(kBases[rng.bounded(4)]);

    // 2% substitution copy
    std::string mutated = base;
    for (int i = 0; i < 20; ++i) mutated[rng.bounded(mutated.size())] = kBases[rng.bounded(4)];

    std::string unrelated;
    for (int i = 0; i < 1000; ++i) unrelated.push_back(kBases[rng.bounded(4)]);

    std::vector<SequenceRecord> records;
    records.push_back({"original", base, std::nullopt});
    records.push_back({"copy", base, std::nullopt});
    records.push_back({"mutated", mutated, std::nullopt});
    records.push_back({"unrelated", unrelated, std::nullopt});

    const auto result = dedup(records, 0.95, 8);
    CHECK(result.kept.size() == 2);
    REQUIRE(result.removed_ids.size() == 2);
    // ties in length broken by id: "copy" is kept, the others collapse onto it
    bool removed_mutated = false;
    for (const auto& id : result.removed_ids) {
        if (id == "mutated") removed_mutated = true;
        CHECK(id != "unrelated");
    }
    CHECK(removed_mutated);

    // idempotent
    const auto again = dedup(result.kept, 0.95, 8);
    CHECK(again.kept.size() == result.kept.size());
    CHECK(again.removed_ids.empty());
}

TEST_CASE("random long sequences survive dedup") {
    Rng rng(37);
    std::vector<SequenceRecord> records;
    for (int i = 0; i < 40; ++i) {
        SequenceRecord r;
        r.id = "u" + std::to_string(i);
        for (int j = 0; j < 1000; ++j) r.residues.push_back(kBases[rng.bounded(4)]);
        records.push_back(std::move(r));
    }
    const auto result = dedup(records, 0.95, 8);
    CHECK(result.kept.size() == records.size());
    CHECK(result.removed_ids.empty());
}
