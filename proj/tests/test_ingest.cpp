#include "semviz/ingest.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace semviz {
namespace {

using testing::ca_line;
using testing::kg_line;
using testing::kMetaHeader;
using testing::meta_row;

RelationBatch ca(const std::string& s) {
    std::istringstream in(s);
    return parse_causal_assertions(in);
}

RelationBatch kg(const std::string& s) {
    std::istringstream in(s);
    return parse_kg_relations(in);
}

MetadataBatch meta(const std::string& s) {
    std::istringstream in(s);
    return parse_article_metadata(in);
}

TEST(CausalAssertions, MalformedMiddleLineIsRejected) {
    const auto good1 = ca_line("A", "B", "Activation", {{"A activates B", "1"}});
    const auto good2 = ca_line("C", "D", "Inhibition", {{"C inhibits D", ""}, {"again", "2"}});
    auto batch = ca(good1 + "{\"subject\": \"X\", oops\n" + good2);
    ASSERT_EQ(batch.records.size(), 2u);
    ASSERT_EQ(batch.rejects.size(), 1u);
    EXPECT_EQ(batch.rejects[0].line, 2u);
    EXPECT_EQ(batch.input_lines, 3u);
    EXPECT_EQ(batch.records[0].id, "ca0:1");
    EXPECT_EQ(batch.records[1].id, "ca0:3");
    EXPECT_EQ(batch.records[1].evidence_ids, (std::vector<std::string>{"ca0:3:0", "ca0:3:1"}));
    ASSERT_EQ(batch.docs.size(), 3u);
    EXPECT_EQ(batch.docs[0].pmid, "1");
    EXPECT_EQ(batch.docs[0].url, pubmed_url("1"));
    EXPECT_FALSE(batch.docs[1].pmid);
    EXPECT_FALSE(batch.docs[1].url);
}

TEST(CausalAssertions, MissingFieldsAndBadValues) {
    auto batch = ca("{\"subject\":\"A\",\"object\":\"B\",\"relation_type\":\"Activation\"}\n"
                    "{\"subject\":\"A\",\"object\":\"\",\"relation_type\":\"Activation\",\"evidence\":[{\"sentence\":\"s\"}]}\n"
                    "{\"subject\":\"A\",\"object\":\"B\",\"relation_type\":\"Activation\",\"evidence\":[]}\n"
                    "[1,2]\n"
                    "{\"subject\":\"A\",\"object\":\"B\",\"relation_type\":\"Activation\",\"evidence\":[{\"sentence\":\"s\",\"url\":\"not a url\"}]}\n"
                    "\n"
                    "{\"subject\":\"A\",\"object\":\"B\",\"relation_type\":\"Activation\",\"evidence\":[{\"sentence\":\"s\",\"pmid\":42}]}\n");
    EXPECT_EQ(batch.records.size(), 1u);
    EXPECT_EQ(batch.rejects.size(), 5u);
    EXPECT_EQ(batch.input_lines, 6u);
    EXPECT_EQ(batch.docs[0].pmid, "42");
    EXPECT_EQ(batch.records[0].id, "ca0:7");
}

TEST(KgRelations, PairKindValidated) {
    auto batch = kg(kg_line("D014013", "CASP3", "Decrease Reaction", "chemical_gene", "s", "5") +
                    kg_line("X", "Y", "Affect Binding", "protein_pair", "s", "6"));
    ASSERT_EQ(batch.records.size(), 1u);
    ASSERT_EQ(batch.rejects.size(), 1u);
    EXPECT_EQ(batch.rejects[0].line, 2u);
    EXPECT_NE(batch.rejects[0].reason.find("pair_kind"), std::string::npos);
    EXPECT_EQ(batch.records[0].pair_kind, PairKind::ChemicalGene);
    EXPECT_EQ(batch.records[0].source, Source::KnowledgeGraph);
    EXPECT_EQ(batch.records[0].evidence_ids, std::vector<std::string>{"kg0:1:0"});
}

TEST(Metadata, AuthorsDuplicatesAndDates) {
    auto batch = meta(kMetaHeader + meta_row("1", "T", "A", "Doe, J; Roe, R", "2020-03-15", "J") +
                      meta_row("1", "T2", "A2", "Other", "2020", "J") +
                      meta_row("2", "T", "A", "", "2020-13", "") + meta_row("", "T", "A", "", "", ""));
    ASSERT_EQ(batch.articles.size(), 2u);
    EXPECT_EQ(batch.articles[0].authors, (std::vector<std::string>{"Doe, J", "Roe, R"}));
    EXPECT_EQ(batch.articles[0].title, "T");
    EXPECT_EQ(batch.articles[0].publish_time, "2020-03-15");
    EXPECT_EQ(batch.duplicates, 1u);
    EXPECT_FALSE(batch.articles[1].publish_time);
    EXPECT_EQ(batch.warnings.size(), 3u);
}

TEST(Metadata, QuotedFieldsWithCommasAndNewlines) {
    auto batch = meta("journal,pmid,title,abstract,authors,publish_time,extra\r\n"
                      "\"Cell, Rep\",7,\"multi\nline\",\"say \"\"hi\"\"\",A,2021-01,x\r\n");
    ASSERT_EQ(batch.articles.size(), 1u);
    const auto& a = batch.articles[0];
    EXPECT_EQ(a.pmid, "7");
    EXPECT_EQ(a.journal, "Cell, Rep");
    EXPECT_EQ(a.title, "multi\nline");
    EXPECT_EQ(a.abstract, "say \"hi\"");
}

TEST(Metadata, MissingColumnNamesIt) {
    try {
        meta("pmid,title,abstract,authors,journal\n1,t,a,b,j\n");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.field(), "publish_time");
        EXPECT_NE(std::string(e.what()).find("publish_time"), std::string::npos);
    }
    EXPECT_THROW(meta(""), FormatError);
}

TEST(Validation, DatesAndUrls) {
    EXPECT_TRUE(is_valid_date_prefix("2020"));
    EXPECT_TRUE(is_valid_date_prefix("2020-03"));
    EXPECT_TRUE(is_valid_date_prefix("2020-02-29"));
    EXPECT_FALSE(is_valid_date_prefix("2020-13"));
    EXPECT_FALSE(is_valid_date_prefix("2020-3"));
    EXPECT_FALSE(is_valid_date_prefix("March 2020"));
    EXPECT_TRUE(is_well_formed_url("https://pubmed.ncbi.nlm.nih.gov/1/"));
    EXPECT_FALSE(is_well_formed_url("ftp:/x"));
}

TEST(Aliases, CanonicalAndDisplay) {
    std::istringstream in("# comment\nNSP1\tSH2D3A\n\nnsp-1\tnsp1\n");
    auto aliases = parse_alias_file(in);
    EXPECT_EQ(aliases.canonical("NSP1"), "sh2d3a");
    EXPECT_EQ(aliases.canonical(" nsp-1 "), "sh2d3a");
    EXPECT_EQ(aliases.canonical(" TNF "), "tnf");
    EXPECT_EQ(aliases.display("sh2d3a"), "SH2D3A");
    EXPECT_FALSE(aliases.display("nsp1"));
}

TEST(Aliases, CyclesConflictsAndBadLines) {
    using Pairs = std::vector<std::pair<std::string, std::string>>;
    EXPECT_THROW(AliasMap(Pairs{{"a", "b"}, {"b", "a"}}), ConfigError);
    EXPECT_THROW(AliasMap(Pairs{{"a", "b"}, {"A", "c"}}), ConfigError);
    std::istringstream bad("one two\n");
    EXPECT_THROW(parse_alias_file(bad), FormatError);
}

TEST(Canonicalize, KeepsSurfaceForms) {
    auto batch = ca(ca_line("Interferon", "NSP1", "Activation", {{"s", "1"}}));
    auto records = canonicalize(batch.records, AliasMap(std::vector<std::pair<std::string, std::string>>{{"NSP1", "SH2D3A"}}));
    EXPECT_EQ(records[0].object, "sh2d3a");
    EXPECT_EQ(records[0].object_display, "NSP1");
    EXPECT_EQ(records[0].subject, "interferon");
}

TEST(Align, SharedPmidLinksSameArticle) {
    std::vector<EvidenceDoc> docs = {{"d0", "s", "5", {}}, {"d1", "s", "5", {}}, {"d2", "s", "6", {}}, {"d3", "s", {}, {}}};
    std::vector<ArticleMeta> articles(1);
    articles[0].pmid = "5";
    auto c = align_by_pmid(docs, articles);
    EXPECT_EQ(c.doc_article[0], 0u);
    EXPECT_EQ(c.doc_article[1], 0u);
    EXPECT_FALSE(c.aligned(2));
    EXPECT_FALSE(c.aligned(3));
}

} // namespace
} // namespace semviz
