#include <doctest.h>

#include "helpers.hpp"
#include "juris/errors.hpp"
#include "juris/model_client.hpp"
#include "juris/tools.hpp"

using namespace juris;
using tools::CheckStatus;
using tools::ToolContext;
using tools::ToolRegistry;

namespace {

const ToolRegistry& registry() {
    static ToolRegistry r;
    return r;
}

ToolContext grounded_ctx(model::ModelClient* client = nullptr) {
    ToolContext ctx;
    ctx.kb = testutil::sample_kb().get();
    ctx.prompts = &testutil::sample_prompts();
    ctx.model = client;
    return ctx;
}

}  // namespace

TEST_CASE("registry holds exactly 7 exploration, 6 checking, 2 memory tools") {
    CHECK(registry().specs().size() == 15);
    CHECK(registry().count(tools::Category::exploration) == 7);
    CHECK(registry().count(tools::Category::checking) == 6);
    CHECK(registry().count(tools::Category::memory) == 2);
    for (auto name : {"law_retrieval", "law_recommendation", "charge_expansion",
                      "case_retrieval", "template_retrieval", "writing_plan_generation",
                      "procedure_retrieval", "law_article_check", "fact_law_relevance_check",
                      "charge_law_consistency_check", "search_query_rewrite",
                      "document_format_check", "procedure_check", "memory_store",
                      "memory_fetch"}) {
        CHECK(registry().find(name) != nullptr);
    }
}

TEST_CASE("wire-dialect aliases resolve to their canonical tools") {
    CHECK(registry().canonical_name("storeMemory") == "memory_store");
    CHECK(registry().canonical_name("fetchMemory") == "memory_fetch");
    CHECK(registry().canonical_name("law_check") == "law_article_check");
    CHECK(registry().canonical_name("plan_generation") == "writing_plan_generation");
    CHECK(registry().canonical_name("law_query_rewrite") == "search_query_rewrite");
    CHECK(registry().canonical_name("crime_law_consistency_check") ==
          "charge_law_consistency_check");
    CHECK(registry().find("law_check")->name == "law_article_check");
}

TEST_CASE("manifest lists all tools with inputs and the alias table") {
    auto manifest = registry().manifest();
    CHECK(manifest["tools"].size() == 15);
    CHECK(manifest["aliases"].size() == 6);
    for (auto& tool : manifest["tools"]) {
        CHECK(!tool["name"].get<std::string>().empty());
        CHECK(tool.contains("inputs"));
        CHECK(tool.contains("output"));
    }
}

TEST_CASE("invoke dispatches law_retrieval") {
    auto ctx = grounded_ctx();
    auto result = registry().invoke("law_retrieval",
                                    {{"query", "recusal request reasons"}, {"topk", 5}}, ctx);
    REQUIRE(!result.is_error);
    CHECK(result.payload["count"].get<int>() >= 1);
    CHECK(result.payload["articles"][0]["article_id"] == "civil_procedure_law_44");
}

TEST_CASE("invoke dispatches procedure_retrieval with the wire arguments") {
    auto ctx = grounded_ctx();
    auto result = registry().invoke("procedure_retrieval",
                                    {{"court_type", "civil court"}, {"stage", 0}}, ctx);
    REQUIRE(!result.is_error);
    CHECK(result.payload["stages"].size() == 5);
}

TEST_CASE("invoke on an unknown tool yields a tool_not_found error result") {
    auto ctx = grounded_ctx();
    auto result = registry().invoke("no_such_tool", nlohmann::json::object(), ctx);
    CHECK(result.is_error);
    CHECK(result.payload["code"] == "tool_not_found");
}

TEST_CASE("per-tool errors come back inside error results") {
    auto ctx = grounded_ctx();
    auto result = registry().invoke("law_retrieval", {{"query", ""}, {"topk", 5}}, ctx);
    CHECK(result.is_error);
    CHECK(result.payload["code"] == "invalid_query");
}

TEST_CASE("law_article_check verifies an existing article with a matching quote") {
    auto ctx = grounded_ctx();
    auto body = testutil::sample_kb()->lookup_article("Civil Code", 122).body;
    auto outcome = tools::law_article_check(
        ctx, {{"law_name", "Civil Code"}, {"article_number", 122}, {"quoted_text", body}});
    CHECK(outcome.status == CheckStatus::verified);
    CHECK(outcome.dimension == tools::Dimension::knowledge_accuracy);
    CHECK(outcome.evidence.find(body) != std::string::npos);
}

TEST_CASE("law_article_check refutes a nonexistent provision") {
    auto ctx = grounded_ctx();
    auto outcome =
        tools::law_article_check(ctx, {{"law_name", "Civil Code"}, {"article_number", 99999}});
    CHECK(outcome.status == CheckStatus::refuted);
    CHECK(outcome.evidence.find("no such provision") != std::string::npos);
}

TEST_CASE("law_article_check refutes a misquoted body and returns the true one") {
    auto ctx = grounded_ctx();
    auto body = testutil::sample_kb()->lookup_article("Civil Code", 122).body;
    auto mutated = body;
    mutated.replace(mutated.find("improper"), 8, "proper");
    auto outcome = tools::law_article_check(
        ctx, {{"law_name", "Civil Code"}, {"article_number", 122}, {"quoted_text", mutated}});
    CHECK(outcome.status == CheckStatus::refuted);
    CHECK(outcome.corrections["authoritative_body"] == body);
}

TEST_CASE("law_article_check accepts combined references like Fig-8 law_check") {
    auto ctx = grounded_ctx();
    auto outcome = tools::law_article_check(ctx, {{"law_name", "Criminal Law Art.264"}});
    CHECK(outcome.status == CheckStatus::verified);
    // A bare number that exists in exactly one law resolves too.
    auto bare = tools::law_article_check(ctx, {{"law_name", "Art. 264"}});
    CHECK(bare.status == CheckStatus::verified);
    auto missing = tools::law_article_check(ctx, {{"law_name", "Art. 9999"}});
    CHECK(missing.status == CheckStatus::refuted);
}

TEST_CASE("fact_law_relevance_check parses element findings and verdicts") {
    model::ScriptedModelClient all_met(
        {"subject: met - natural person\nobject: met - property of another\nsubjective: met - "
         "intent to appropriate\nobjective: met - secret taking\nVERDICT: verified"});
    auto ctx = grounded_ctx(&all_met);
    auto outcome = tools::fact_law_relevance_check(
        ctx, {{"fact", "took a phone from a locker"}, {"law", "Criminal Law Art.264"}});
    CHECK(outcome.status == CheckStatus::verified);
    CHECK(outcome.evidence.find("subject: met") != std::string::npos);

    model::ScriptedModelClient one_unmet(
        {"subject: met - ok\nobject: unmet - no property of another involved\nsubjective: met - "
         "ok\nobjective: met - ok\nVERDICT: refuted"});
    auto ctx2 = grounded_ctx(&one_unmet);
    auto refuted = tools::fact_law_relevance_check(
        ctx2, {{"fact", "kept own property"}, {"law", "Criminal Law Art.264"}});
    CHECK(refuted.status == CheckStatus::refuted);
    CHECK(refuted.evidence.find("object") != std::string::npos);
    CHECK(refuted.corrections["unmet_elements"][0] == "object");
}

TEST_CASE("fact_law_relevance_check without a verdict token is inconclusive") {
    model::ScriptedModelClient prose({"The provision may or may not apply, hard to say."});
    auto ctx = grounded_ctx(&prose);
    auto outcome = tools::fact_law_relevance_check(
        ctx, {{"fact", "unclear facts"}, {"law", "Criminal Law Art.264"}});
    CHECK(outcome.status == CheckStatus::inconclusive);
    CHECK(outcome.evidence.find("hard to say") != std::string::npos);
}

TEST_CASE("charge_law_consistency_check trusts the mapping first") {
    auto ctx = grounded_ctx();
    auto verified = tools::charge_law_consistency_check(
        ctx, {{"charge", "theft"}, {"law", "criminal_law_264"}});
    CHECK(verified.status == CheckStatus::verified);

    auto refuted = tools::charge_law_consistency_check(
        ctx, {{"charge", "theft"}, {"law", "criminal_law_234"}});
    CHECK(refuted.status == CheckStatus::refuted);
    REQUIRE(refuted.corrections.contains("mapped_articles"));
    CHECK(refuted.corrections["mapped_articles"].size() == 3);

    auto unknown = registry().invoke("charge_law_consistency_check",
                                     {{"charge", "no such crime"}, {"law", "criminal_law_264"}},
                                     ctx);
    CHECK(unknown.is_error);
    CHECK(unknown.payload["code"] == "not_found");
}

TEST_CASE("charge_law_consistency_check falls back to the rubric for unmapped charges") {
    testutil::TempDir dir;
    testutil::CorpusBuilder corpus;
    corpus.laws = testutil::law_line("a1", "Some Law", 1, "body about sabotage of equipment");
    corpus.charges = R"({"charge_id": "c1", "name": "sabotage"})"
                     "\n";
    corpus.write(dir.path());
    auto base = kb::KnowledgeBase::ingest(dir.path());
    model::ScriptedModelClient client({"The statute covers the charge.\nVERDICT: verified"});
    ToolContext ctx;
    ctx.kb = base.get();
    ctx.prompts = &testutil::sample_prompts();
    ctx.model = &client;
    auto outcome =
        tools::charge_law_consistency_check(ctx, {{"charge", "sabotage"}, {"law", "Some Law 1"}});
    CHECK(outcome.status == CheckStatus::verified);
}

TEST_CASE("search_query_rewrite passes the model rewrite through") {
    model::ScriptedModelClient client({"restitution of child support without legal basis"});
    auto ctx = grounded_ctx(&client);
    auto out = tools::search_query_rewrite(
        ctx, {{"query", "get money back for kid not mine"}, {"context", "paternity dispute"}});
    CHECK(out["query"] == "restitution of child support without legal basis");
    CHECK(out["rewritten"] == true);
}

TEST_CASE("search_query_rewrite keeps the original on an empty rewrite") {
    model::ScriptedModelClient client({"   \n  "});
    auto ctx = grounded_ctx(&client);
    auto out = tools::search_query_rewrite(ctx, {{"query", "original words"}});
    CHECK(out["query"] == "original words");
    CHECK(out["rewritten"] == false);
    CHECK(out.contains("warning"));
}

TEST_CASE("a rewrite can recover a gold article the original query misses") {
    // The original query shares no token with the article; the rewrite does.
    testutil::TempDir dir;
    testutil::CorpusBuilder corpus;
    corpus.laws =
        testutil::law_line("gold", "Restitution Law", 7,
                           "improper benefit obtained without legal basis shall be returned") +
        testutil::law_line("noise", "Noise Law", 9, "traffic rules for bicycles on highways");
    corpus.write(dir.path());
    auto base = kb::KnowledgeBase::ingest(dir.path());
    CHECK(base->search_articles("kid cash back", 5).empty());
    model::ScriptedModelClient client({"improper benefit returned without legal basis"});
    ToolContext ctx;
    ctx.kb = base.get();
    ctx.prompts = &testutil::sample_prompts();
    ctx.model = &client;
    auto rewritten = tools::search_query_rewrite(ctx, {{"query", "kid cash back"}});
    auto hits = base->search_articles(rewritten["query"].get<std::string>(), 5);
    REQUIRE(!hits.empty());
    CHECK(hits[0].article->article_id == "gold");
}

TEST_CASE("document_format_check accepts a complete in-order document") {
    auto ctx = grounded_ctx();
    std::string doc = "plaintiff information\nJane Doe\ndefendant information\nJohn Roe\n"
                      "claims\n1. return the payments\nevidence\nreceipts\n"
                      "facts and reasoning\npaid under mistake\n";
    auto outcome = tools::document_format_check(
        ctx, {{"document_type", "complaint document"}, {"document", doc}});
    CHECK(outcome.status == CheckStatus::verified);
}

TEST_CASE("document_format_check reports a missing section") {
    auto ctx = grounded_ctx();
    std::string doc = "plaintiff information\nx\ndefendant information\ny\n"
                      "claims\nz\nfacts and reasoning\nw\n";
    auto outcome = tools::document_format_check(
        ctx, {{"document_type", "complaint"}, {"document", doc}});
    CHECK(outcome.status == CheckStatus::refuted);
    bool found = false;
    for (auto& issue : outcome.corrections["issues"]) {
        if (issue.get<std::string>() == "missing: evidence") found = true;
    }
    CHECK(found);
}

TEST_CASE("document_format_check names a swapped pair") {
    auto ctx = grounded_ctx();
    std::string doc = "plaintiff information\nx\nclaims\nz\ndefendant information\ny\n"
                      "evidence\ne\nfacts and reasoning\nw\n";
    auto outcome = tools::document_format_check(
        ctx, {{"document_type", "complaint"}, {"document", doc}});
    CHECK(outcome.status == CheckStatus::refuted);
    bool found = false;
    for (auto& issue : outcome.corrections["issues"]) {
        auto s = issue.get<std::string>();
        if (s.find("out of order") != std::string::npos &&
            s.find("claims") != std::string::npos &&
            s.find("defendant information") != std::string::npos) {
            found = true;
        }
    }
    CHECK(found);
    CHECK_THROWS_AS(
        tools::document_format_check(ctx, {{"document_type", "subpoena"}, {"document", "x"}}),
        Error);
}

TEST_CASE("template skeletons always pass the format check") {
    auto ctx = grounded_ctx();
    for (auto type : {kb::TemplateType::complaint, kb::TemplateType::defence}) {
        auto skeleton = testutil::sample_kb()->get_template(type).skeleton();
        auto outcome = tools::document_format_check(
            ctx, {{"document_type", kb::to_string(type)}, {"document", skeleton}});
        CHECK(outcome.status == CheckStatus::verified);
    }
}

TEST_CASE("procedure_check reports progress and guidance") {
    auto base = testutil::sample_kb();
    scenarios::CourtStateMachine machine(base->get_procedure(kb::CourtType::civil));
    for (auto& a : machine.spec().stages[0].mandatory_actions) {
        machine.record_action("preparation", a.id);
    }
    machine.advance_stage();
    auto ctx = grounded_ctx();
    ctx.court = &machine;
    auto outcome = tools::procedure_check(ctx, {{"court_type", "civil court"}});
    CHECK(outcome.status == CheckStatus::verified);
    CHECK(outcome.evidence.find("investigation") != std::string::npos);
    // Guidance lists the next stage's mandatory actions.
    auto next = outcome.corrections["next_required_actions"];
    CHECK(next.size() == 4);
    CHECK(next[0] == "plaintiff_statement");
}

TEST_CASE("procedure_check refutes after an out-of-order attempt") {
    auto base = testutil::sample_kb();
    scenarios::CourtStateMachine machine(base->get_procedure(kb::CourtType::civil));
    for (auto& a : machine.spec().stages[0].mandatory_actions) {
        machine.record_action("preparation", a.id);
    }
    machine.advance_stage();
    machine.try_record_marker("pronounce_judgment");  // decision-stage action during investigation
    auto ctx = grounded_ctx();
    ctx.court = &machine;
    auto outcome = tools::procedure_check(ctx, {{"court_type", "civil"}});
    CHECK(outcome.status == CheckStatus::refuted);
    CHECK(outcome.evidence.find("pronounce_judgment") != std::string::npos);
    CHECK(outcome.evidence.find("decision") != std::string::npos);
}

TEST_CASE("procedure_check outside a court scenario is invalid state") {
    auto ctx = grounded_ctx();
    auto result = registry().invoke("procedure_check", {{"court_type", "civil"}}, ctx);
    CHECK(result.is_error);
    CHECK(result.payload["code"] == "invalid_state");
}

TEST_CASE("writing_plan_generation covers every mandatory section") {
    model::ScriptedModelClient client(
        {"1. Collect plaintiff information from the client\n2. Draft the claims\n"
         "3. List the evidence"});
    auto ctx = grounded_ctx(&client);
    auto plan = tools::writing_plan_generation(ctx, {{"document_type", "complaint document"}});
    auto steps = plan["plan"];
    for (auto section : {"plaintiff information", "defendant information", "claims", "evidence",
                         "facts and reasoning"}) {
        bool covered = false;
        for (auto& step : steps) {
            if (text::normalize_loose(step.get<std::string>())
                    .find(text::normalize_loose(section)) != std::string::npos) {
                covered = true;
            }
        }
        CHECK_MESSAGE(covered, section);
    }
    auto ctx2 = grounded_ctx();
    CHECK_THROWS_AS(tools::writing_plan_generation(ctx2, {{"document_type", "warrant"}}), Error);
}

TEST_CASE("grounded checks succeed with a model client that always fails") {
    model::FailingModelClient failing;
    auto ctx = grounded_ctx(&failing);

    auto law = tools::law_article_check(ctx, {{"law_name", "Civil Code"}, {"article_number", 122}});
    CHECK(law.status == CheckStatus::verified);

    auto charge = tools::charge_law_consistency_check(
        ctx, {{"charge", "theft"}, {"law", "criminal_law_264"}});
    CHECK(charge.status == CheckStatus::verified);

    auto doc = tools::document_format_check(
        ctx, {{"document_type", "defence"},
              {"document", "respondent information\nr\ndefence arguments\nd\nevidence\ne\n"}});
    CHECK(doc.status == CheckStatus::verified);

    scenarios::CourtStateMachine machine(
        testutil::sample_kb()->get_procedure(kb::CourtType::criminal));
    ctx.court = &machine;
    auto proc = tools::procedure_check(ctx, {{"court_type", "criminal"}});
    CHECK(proc.status == CheckStatus::verified);

    // Analytical tools degrade gracefully instead of crashing.
    auto analytical = tools::fact_law_relevance_check(
        ctx, {{"fact", "f"}, {"law", "Criminal Law Art.264"}});
    CHECK(analytical.status == CheckStatus::inconclusive);
}

TEST_CASE("memory tools route through the store with the caller role") {
    memory::MemoryStore store;
    auto ctx = grounded_ctx();
    ctx.memory = &store;
    auto stored = registry().invoke(
        "memory_store", {{"memory_type", "context"}, {"content", "disputed issue: ownership"}},
        ctx);
    REQUIRE(!stored.is_error);
    CHECK(stored.payload["entry_id"] == 1);

    auto denied = registry().invoke(
        "memory_store", {{"memory_type", "knowledge"}, {"content", "statute text"}}, ctx);
    CHECK(denied.is_error);
    CHECK(denied.payload["code"] == "policy_violation");

    auto fetched = registry().invoke("memory_fetch", {{"memory_type", "context"}}, ctx);
    REQUIRE(!fetched.is_error);
    CHECK(fetched.payload["count"] == 1);

    // The storeMemory alias behaves identically.
    auto via_alias = registry().invoke(
        "storeMemory", {{"memory_type", "context"}, {"content", "second entry"}}, ctx);
    REQUIRE(!via_alias.is_error);
    CHECK(via_alias.payload["entry_id"] == 2);
}

TEST_CASE("refuted outcomes always carry evidence or corrections") {
    auto ctx = grounded_ctx();
    for (auto outcome :
         {tools::law_article_check(ctx, {{"law_name", "Civil Code"}, {"article_number", 99999}}),
          tools::charge_law_consistency_check(ctx, {{"charge", "theft"},
                                                    {"law", "criminal_law_234"}}),
          tools::document_format_check(ctx, {{"document_type", "complaint"},
                                             {"document", "nothing here"}})}) {
        if (outcome.status == CheckStatus::refuted) {
            CHECK((!outcome.evidence.empty() || !outcome.corrections.empty()));
        }
    }
}
