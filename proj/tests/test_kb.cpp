#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "juris/errors.hpp"
#include "juris/kb.hpp"
#include "juris/text.hpp"

using namespace juris;
using testutil::CorpusBuilder;
using testutil::TempDir;
using testutil::law_line;

TEST_CASE("ingest reports the sample corpus counts") {
    auto base = testutil::sample_kb();
    CHECK(base->counts().articles == 12);
    CHECK(base->counts().charges == 4);
    CHECK(base->counts().cases == 3);
    CHECK(base->counts().templates == 2);
    CHECK(base->counts().procedures == 2);
}

TEST_CASE("ingest of an empty directory fails") {
    TempDir dir;
    CHECK_THROWS_WITH_AS(kb::KnowledgeBase::ingest(dir.path()),
                         doctest::Contains("missing corpus file"), Error);
}

TEST_CASE("dangling charge-law reference names the offending pair") {
    TempDir dir;
    CorpusBuilder corpus;
    corpus.laws = law_line("a1", "Some Law", 1, "body text");
    corpus.charges = R"({"charge_id": "c1", "name": "theft"})"
                     "\n";
    corpus.map = R"({"charge_id": "c1", "article_ids": ["ghost_article"]})"
                 "\n";
    corpus.write(dir.path());
    try {
        kb::KnowledgeBase::ingest(dir.path());
        FAIL("expected IntegrityError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::integrity_error);
        CHECK(std::string(e.what()).find("c1") != std::string::npos);
        CHECK(std::string(e.what()).find("ghost_article") != std::string::npos);
    }
}

TEST_CASE("criminal case without charges is rejected") {
    TempDir dir;
    CorpusBuilder corpus;
    corpus.laws = law_line("a1", "Some Law", 1, "body text");
    corpus.cases =
        R"({"case_id": "k1", "case_type": "criminal", "facts": "f", "judgment": "j", "cited_article_ids": ["a1"], "charge_ids": []})"
        "\n";
    corpus.write(dir.path());
    CHECK_THROWS_AS(kb::KnowledgeBase::ingest(dir.path()), Error);
}

TEST_CASE("search_articles: recusal query returns at most topk, best first") {
    auto base = testutil::sample_kb();
    auto hits = base->search_articles("Must a recusal request state reasons?", 5);
    REQUIRE(!hits.empty());
    CHECK(hits.size() <= 5);
    CHECK(hits[0].article->article_id == "civil_procedure_law_44");
    for (std::size_t i = 1; i < hits.size(); ++i) {
        CHECK(hits[i - 1].score >= hits[i].score);
    }
}

TEST_CASE("search_articles: querying a full body ranks that article first") {
    auto base = testutil::sample_kb();
    for (auto& article : base->articles()) {
        auto hits = base->search_articles(article.body, 1);
        REQUIRE(!hits.empty());
        CHECK(hits[0].article->article_id == article.article_id);
    }
}

TEST_CASE("search_articles rejects empty queries and bad topk") {
    auto base = testutil::sample_kb();
    CHECK_THROWS_AS(base->search_articles("", 5), Error);
    CHECK_THROWS_AS(base->search_articles("   ", 5), Error);
    CHECK_THROWS_AS(base->search_articles("theft", 0), Error);
}

TEST_CASE("search results match independent re-scoring (oracle equivalence)") {
    // Brute-force scorer: same declared formula, recomputed per document.
    auto base = testutil::sample_kb();
    auto query = "return of support payments without legal basis";
    auto hits = base->search_articles(query, base->articles().size());

    const auto& articles = base->articles();
    std::size_t n = articles.size();
    auto qtoks = text::tokenize(query);
    std::map<std::string, int> qtf;
    for (auto& t : qtoks) qtf[t]++;
    std::map<std::string, int> df;
    std::map<std::string, std::map<std::string, int>> dtf;
    for (auto& a : articles) {
        std::map<std::string, int> tf;
        for (auto& t : text::tokenize(a.body)) tf[t]++;
        for (auto& [t, c] : tf) df[t]++;
        dtf[a.article_id] = std::move(tf);
    }
    auto idf = [&](const std::string& t) {
        auto it = df.find(t);
        return std::log(double(n + 1) / ((it == df.end() ? 0 : it->second) + 1)) + 1.0;
    };
    double qnorm = 0;
    for (auto& [t, c] : qtf) qnorm += (c * idf(t)) * (c * idf(t));
    qnorm = std::sqrt(qnorm);
    for (auto& hit : hits) {
        const auto& tf = dtf[hit.article->article_id];
        double dot = 0, dnorm = 0;
        for (auto& [t, c] : tf) dnorm += (c * idf(t)) * (c * idf(t));
        dnorm = std::sqrt(dnorm);
        for (auto& [t, c] : qtf) {
            auto it = tf.find(t);
            if (it != tf.end()) dot += (c * idf(t)) * (it->second * idf(t));
        }
        CHECK(hit.score == dot / (qnorm * dnorm));
    }
}

TEST_CASE("similar_articles: adjacent sibling outranks unrelated articles") {
    // Bodies share no tokens, so ranking is driven by the declared bonus:
    // sibling (same law, adjacent number) 0.50, same-law 0.25, other 0.
    TempDir dir;
    CorpusBuilder corpus;
    corpus.laws = law_line("t10", "Target Law", 10, "alpha bravo charlie") +
                  law_line("t11", "Target Law", 11, "delta echo foxtrot") +
                  law_line("t20", "Target Law", 20, "golf hotel india") +
                  law_line("o5", "Other Law", 5, "juliet kilo lima");
    corpus.write(dir.path());
    auto base = kb::KnowledgeBase::ingest(dir.path());
    auto hits = base->similar_articles("t10", 10);
    REQUIRE(hits.size() == 2);  // o5 scores zero and is omitted
    CHECK(hits[0].article->article_id == "t11");
    CHECK(hits[0].score == doctest::Approx(0.5));
    CHECK(hits[1].article->article_id == "t20");
    CHECK(hits[1].score == doctest::Approx(0.25));
}

TEST_CASE("similar_articles: single-article corpus yields an empty list") {
    TempDir dir;
    CorpusBuilder corpus;
    corpus.laws = law_line("only", "Lonely Law", 1, "sole provision body");
    corpus.write(dir.path());
    auto base = kb::KnowledgeBase::ingest(dir.path());
    CHECK(base->similar_articles("only", 5).empty());
    CHECK_THROWS_AS(base->similar_articles("missing", 5), Error);
}

TEST_CASE("similar_articles never returns its input and is deterministic") {
    auto base = testutil::sample_kb();
    for (auto& a : base->articles()) {
        auto first = base->similar_articles(a.article_id, 0u);
        auto second = base->similar_articles(a.article_id, 0u);
        REQUIRE(first.size() == second.size());
        for (std::size_t i = 0; i < first.size(); ++i) {
            CHECK(first[i].article->article_id != a.article_id);
            CHECK(first[i].article->article_id == second[i].article->article_id);
            CHECK(first[i].score == second[i].score);
        }
    }
}

TEST_CASE("expand_charges ranks by shared mapped articles") {
    auto base = testutil::sample_kb();
    // theft maps to {264, 269, 312}; robbery shares {269, 312}; fraud none.
    auto related = base->expand_charges({"theft"}, 5);
    REQUIRE(related.size() == 1);
    CHECK(related[0].first->charge_id == "charge_robbery");
    CHECK(related[0].second == 2);
}

TEST_CASE("expand_charges: no shared articles yields empty; aliases resolve") {
    auto base = testutil::sample_kb();
    CHECK(base->expand_charges({"fraud"}, 5).empty());
    auto canonical = base->expand_charges({"theft"}, 5);
    auto via_alias = base->expand_charges({"larceny"}, 5);
    REQUIRE(canonical.size() == via_alias.size());
    for (std::size_t i = 0; i < canonical.size(); ++i) {
        CHECK(canonical[i].first->charge_id == via_alias[i].first->charge_id);
        CHECK(canonical[i].second == via_alias[i].second);
    }
    CHECK_THROWS_AS(base->expand_charges({"no such crime"}, 5), Error);
}

TEST_CASE("expand_charges overlap is symmetric") {
    auto base = testutil::sample_kb();
    for (auto& a : base->charges()) {
        for (auto& [related, overlap] : base->expand_charges({a.name}, 0u)) {
            auto reverse = base->expand_charges({related->name}, 0u);
            bool found = false;
            for (auto& [back, back_overlap] : reverse) {
                if (back->charge_id == a.charge_id) {
                    found = true;
                    CHECK(back_overlap == overlap);
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("search_cases filters by type and ranks verbatim facts first") {
    auto base = testutil::sample_kb();
    for (auto& rec : base->cases()) {
        auto hits = base->search_cases(rec.case_type, rec.facts, 3);
        REQUIRE(!hits.empty());
        CHECK(hits[0].record->case_id == rec.case_id);
        for (auto& hit : hits) CHECK(hit.record->case_type == rec.case_type);
    }
    CHECK(base->search_cases(kb::CaseType::criminal, "theft of a phone", 1).size() == 1);
    CHECK_THROWS_AS(base->search_cases(kb::CaseType::civil, "", 3), Error);
}

TEST_CASE("search_cases on a corpus without that type yields empty") {
    TempDir dir;
    CorpusBuilder corpus;
    corpus.laws = law_line("a1", "Some Law", 1, "body text");
    corpus.charges = R"({"charge_id": "c1", "name": "theft"})"
                     "\n";
    corpus.cases =
        R"({"case_id": "k1", "case_type": "criminal", "facts": "stole a phone", "judgment": "guilty", "cited_article_ids": ["a1"], "charge_ids": ["c1"]})"
        "\n";
    corpus.write(dir.path());
    auto base = kb::KnowledgeBase::ingest(dir.path());
    CHECK(base->search_cases(kb::CaseType::civil, "stole a phone", 5).empty());
}

TEST_CASE("lookup_article round-trips every ingested article") {
    auto base = testutil::sample_kb();
    for (auto& a : base->articles()) {
        CHECK(base->lookup_article(a.law_name, a.article_number).body == a.body);
    }
}

TEST_CASE("lookup_article: exact or nothing") {
    auto base = testutil::sample_kb();
    CHECK(base->lookup_article("Civil Code", 122).article_id == "civil_code_122");
    CHECK(base->lookup_article("  civil code ", 122).article_id == "civil_code_122");
    CHECK_THROWS_AS(base->lookup_article("Civil Code", 99999), Error);
    CHECK_THROWS_AS(base->lookup_article("Civil", 122), Error);
}

TEST_CASE("get_template carries the required mandatory sections") {
    auto base = testutil::sample_kb();
    auto complaint = base->get_template(kb::TemplateType::complaint).mandatory_sections();
    CHECK(complaint == std::vector<std::string>{"plaintiff information", "defendant information",
                                                "claims", "evidence", "facts and reasoning"});
    auto defence = base->get_template(kb::TemplateType::defence).mandatory_sections();
    CHECK(defence == std::vector<std::string>{"respondent information", "defence arguments",
                                              "evidence"});
    CHECK_THROWS_AS(kb::template_type_from_string("subpoena"), Error);
    CHECK(kb::template_type_from_string("complaint document") == kb::TemplateType::complaint);
    CHECK(kb::template_type_from_string("defense") == kb::TemplateType::defence);
}

TEST_CASE("get_procedure: full spec or single stage") {
    auto base = testutil::sample_kb();
    auto civil = base->get_procedure_json(kb::CourtType::civil, 0);
    REQUIRE(civil["stages"].size() == 5);
    CHECK(civil["stages"][0]["name"] == "preparation");
    CHECK(civil["stages"][1]["name"] == "investigation");
    CHECK(civil["stages"][2]["name"] == "debate");
    CHECK(civil["stages"][3]["name"] == "mitigation");
    CHECK(civil["stages"][4]["name"] == "decision");

    auto criminal = base->get_procedure_json(kb::CourtType::criminal, 0);
    CHECK(criminal["stages"].size() == 3);

    auto stage2 = base->get_procedure_json(kb::CourtType::civil, 2);
    CHECK(stage2["name"] == "investigation");
    CHECK_THROWS_AS(base->get_procedure_json(kb::CourtType::civil, 9), Error);
}

TEST_CASE("every stage has at least one mandatory action") {
    auto base = testutil::sample_kb();
    for (auto type : {kb::CourtType::civil, kb::CourtType::criminal}) {
        for (auto& stage : base->get_procedure(type).stages) {
            CHECK(!stage.mandatory_actions.empty());
        }
    }
}

namespace {

// Toy deterministic embedder: counts characters into a fixed number of
// buckets. Good enough to prove the dense path is pluggable.
class BucketEmbedder : public kb::Embedder {
public:
    std::vector<double> embed(const std::string& s) const override {
        std::vector<double> v(8, 0.0);
        for (unsigned char c : s) v[c % 8] += 1.0;
        return v;
    }
    std::size_t dimension() const override { return 8; }
};

}  // namespace

TEST_CASE("a dense embedder replaces lexical ranking without API change") {
    auto embedder = std::make_shared<BucketEmbedder>();
    CHECK(embedder->embed("abc") == embedder->embed("abc"));
    CHECK(embedder->embed("abc").size() == embedder->dimension());
    auto base = kb::KnowledgeBase::ingest(testutil::corpus_dir(), embedder);
    auto hits = base->search_articles("theft of property", 3);
    CHECK(hits.size() == 3);
    auto again = base->search_articles("theft of property", 3);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].article->article_id == again[i].article->article_id);
    }
}

TEST_CASE("parse_article_ref understands the common citation shapes") {
    auto r1 = kb::parse_article_ref("Criminal Law Art.201");
    CHECK(r1.law_name == "Criminal Law");
    CHECK(r1.article_number == 201);
    auto r2 = kb::parse_article_ref("Civil Code Article 122");
    CHECK(r2.law_name == "Civil Code");
    CHECK(r2.article_number == 122);
    auto r3 = kb::parse_article_ref("Art. 264");
    CHECK(r3.law_name.empty());
    CHECK(r3.article_number == 264);
    auto r4 = kb::parse_article_ref("Civil Code 122");
    CHECK(r4.law_name == "Civil Code");
    CHECK(r4.article_number == 122);
    auto r5 = kb::parse_article_ref("Some Law");
    CHECK(r5.law_name == "Some Law");
    CHECK(!r5.article_number);
}

TEST_CASE("detect_section_sequence finds headings in document order") {
    std::string doc = "Title\nClaims:\nsome claim text\nEVIDENCE\nitems\n";
    auto seq = kb::detect_section_sequence(doc, {"evidence", "claims", "facts"});
    CHECK(seq == std::vector<std::string>{"claims", "evidence"});
}
