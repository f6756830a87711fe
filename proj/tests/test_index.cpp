#include "semviz/index.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

namespace semviz {
namespace {

using testing::Corpus;
using testing::ingest;
using testing::worked_fixture;
using testing::synthetic_corpus;
namespace oracle = testing::oracle;

std::vector<uint32_t> docs_of(std::span<const uint32_t> s) { return {s.begin(), s.end()}; }

TEST(Index, WorkedFixtureTerms) {
    auto c = ingest(worked_fixture());
    const auto& idx = c.index;
    EXPECT_EQ(idx.records().size(), 4u);
    EXPECT_EQ(idx.docs().size(), 4u);
    EXPECT_EQ(docs_of(idx.posting(Field::Object, "NSP1")), docs_of(idx.posting(Field::Object, "sh2d3a")));
    EXPECT_EQ(idx.posting(Field::Object, "NSP1").size(), 1u);
    EXPECT_EQ(idx.entity_display("sh2d3a"), "SH2D3A");
    EXPECT_EQ(idx.posting(Field::Chemical, "D014013").size(), 1u);
    EXPECT_EQ(idx.posting(Field::Gene, "casp3").size(), 1u);
    EXPECT_EQ(idx.posting(Field::Journal, "emerg microbes infect").size(), 2u);
    EXPECT_EQ(idx.posting(Field::Author, "Doe, J").size(), 1u);
    EXPECT_EQ(idx.posting(Field::PublishTime, "2020-03").size(), 2u);
    EXPECT_EQ(idx.posting(Field::PublishTime, "2020-03-15").size(), 2u);
    EXPECT_EQ(idx.posting(Field::FunctionalType, "COVID-19 Activator").size(), 1u);
    EXPECT_EQ(idx.posting(Field::FunctionalType, "SH2D3A Activator").size(), 1u);
    EXPECT_EQ(idx.posting(Field::FunctionalType, "--CASP3 Regulator").size(), 1u);
    EXPECT_EQ(idx.posting(Field::RoleSubject, "ocrelizumab").size(), 1u);
    EXPECT_TRUE(idx.posting(Field::RoleEnzyme, "ocrelizumab").empty());
    EXPECT_TRUE(idx.posting(Field::RoleSubject, "D014013").empty());
    EXPECT_TRUE(idx.posting(Field::Object, "nothing").empty());
    EXPECT_EQ(idx.text_match("coronavirus").size(), 2u);
    EXPECT_EQ(idx.text_match("decreased expression MYC").size(), 1u);
}

TEST(Index, EmptyContextResolvesToAllDocs) {
    auto c = ingest(worked_fixture());
    EXPECT_EQ(c.index.resolve({}).docs, c.index.all_docs());
}

TEST(Index, NonIndexedFieldCannotFilter) {
    FilterContext ctx;
    EXPECT_THROW(ctx.add(Field::UpstreamRegulator, "x"), QueryError);
}

TEST(Index, DuplicateIdsAndDanglingEvidence) {
    auto c = ingest(worked_fixture());
    auto records = c.records;
    records.push_back(records.front());
    EXPECT_THROW(build_index(records, c.aligned, c.taxonomy), BuildError);
    records = c.records;
    records[0].evidence_ids.push_back("nowhere");
    EXPECT_THROW(build_index(records, c.aligned, c.taxonomy), BuildError);
}

// Every (doc, field, term) the oracle derives is in the posting list, and
// every posting entry is derived by the oracle.
TEST(Index, PostingsMatchOracleTerms) {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        auto c = ingest(synthetic_corpus(seed));
        oracle::Oracle o{c};
        const auto table = o.table();
        for (size_t f = 0; f < kIndexedFieldCount; ++f) {
            const auto field = static_cast<Field>(f);
            std::map<std::string, std::vector<uint32_t>> expected;
            for (uint32_t d = 0; d < table.size(); ++d) {
                for (const auto& t : table[d][f]) expected[t].push_back(d);
            }
            std::map<std::string, std::vector<uint32_t>> actual;
            for (const auto& t : c.index.dictionary(field).terms()) actual[t.key] = t.docs;
            EXPECT_EQ(actual, expected) << "seed " << seed << " field " << field_name(field);
            for (uint32_t d = 0; d < table.size(); ++d) {
                std::set<std::string> fw;
                for (auto t : c.index.doc_terms(d, field)) fw.insert(c.index.dictionary(field)[t].key);
                EXPECT_EQ(fw, table[d][f]);
            }
        }
    }
}

TEST(Index, ResolveMatchesLinearScan) {
    std::mt19937_64 rng(11);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        auto c = ingest(synthetic_corpus(seed));
        oracle::Oracle o{c};
        const auto table = o.table();
        for (int i = 0; i < 100; ++i) {
            auto ctx = oracle::random_context(rng, c, table);
            EXPECT_EQ(c.index.resolve(ctx).docs, oracle::resolve(o, table, ctx));
        }
    }
}

TEST(Index, AddingConstraintNeverGrowsResult) {
    std::mt19937_64 rng(5);
    auto c = ingest(synthetic_corpus(3));
    oracle::Oracle o{c};
    const auto table = o.table();
    for (int i = 0; i < 300; ++i) {
        auto ctx = oracle::random_context(rng, c, table);
        auto more = ctx;
        auto extra = oracle::random_context(rng, c, table, 1);
        more.constraints.insert(extra.constraints.begin(), extra.constraints.end());
        const auto a = c.index.resolve(ctx).docs;
        const auto b = c.index.resolve(more).docs;
        EXPECT_TRUE(std::includes(a.begin(), a.end(), b.begin(), b.end()));
    }
}

TEST(Index, SerializationRoundTrip) {
    auto c = ingest(synthetic_corpus(1));
    const auto bytes = c.index.serialize();
    const auto back = Index::deserialize(bytes);
    EXPECT_EQ(back.serialize(), bytes);
    EXPECT_EQ(back.functional_types(), c.index.functional_types());
    EXPECT_EQ(back.records(), c.index.records());
    EXPECT_EQ(back.docs(), c.index.docs());
    for (uint32_t d = 0; d < back.docs().size(); ++d) {
        for (size_t f = 0; f < kIndexedFieldCount; ++f) {
            EXPECT_EQ(docs_of(back.doc_terms(d, static_cast<Field>(f))), docs_of(c.index.doc_terms(d, static_cast<Field>(f))));
        }
    }

    const auto dir = std::filesystem::temp_directory_path() / "semviz_index_roundtrip";
    std::filesystem::remove_all(dir);
    c.index.save(dir.string());
    EXPECT_EQ(Index::load(dir.string()).serialize(), bytes);
    EXPECT_EQ(Index::load((dir / "index.bin").string()).serialize(), bytes);
    std::filesystem::remove_all(dir);
}

TEST(Index, BuildIsIndependentOfRun) {
    EXPECT_EQ(ingest(synthetic_corpus(4)).index.serialize(), ingest(synthetic_corpus(4)).index.serialize());
}

TEST(Index, CorruptArtifactsAreRejected) {
    const auto bytes = ingest(synthetic_corpus(2)).index.serialize();
    EXPECT_THROW(Index::deserialize(""), FormatError);
    EXPECT_THROW(Index::deserialize(bytes.substr(0, bytes.size() / 2)), FormatError);
    auto flipped = bytes;
    flipped[bytes.size() / 3] = static_cast<char>(flipped[bytes.size() / 3] ^ 0x5a);
    EXPECT_THROW(Index::deserialize(flipped), FormatError);
    auto magic = bytes;
    magic[0] = 'X';
    EXPECT_THROW(Index::deserialize(magic), FormatError);
    EXPECT_THROW(Index::load("/nonexistent/semviz"), Error);
}

} // namespace
} // namespace semviz
