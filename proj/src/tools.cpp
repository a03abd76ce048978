#include "juris/tools.hpp"

#include <algorithm>
#include <sstream>

#include "juris/errors.hpp"
#include "juris/text.hpp"

namespace juris::tools {

using protocol::ArgSpec;
using protocol::ToolResult;
using protocol::ValueKind;

std::string to_string(Category c) {
    switch (c) {
        case Category::exploration: return "exploration";
        case Category::checking: return "checking";
        case Category::memory: return "memory";
    }
    return "exploration";
}

std::string to_string(Grounding g) {
    return g == Grounding::grounded ? "grounded" : "analytical";
}

std::string to_string(Dimension d) {
    switch (d) {
        case Dimension::knowledge_accuracy: return "knowledge_accuracy";
        case Dimension::fact_law_relevance: return "fact_law_relevance";
        case Dimension::procedural_compliance: return "procedural_compliance";
    }
    return "knowledge_accuracy";
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::verified: return "verified";
        case CheckStatus::refuted: return "refuted";
        case CheckStatus::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

CheckStatus check_status_from_string(const std::string& s) {
    auto v = text::normalize_law_name(s);
    if (v == "verified") return CheckStatus::verified;
    if (v == "refuted") return CheckStatus::refuted;
    if (v == "inconclusive") return CheckStatus::inconclusive;
    throw Error(ErrorCode::invalid_argument, "unknown check status: " + s);
}

json CheckOutcome::to_json() const {
    return json{{"check", check},
                {"dimension", to_string(dimension)},
                {"status", to_string(status)},
                {"evidence", evidence},
                {"corrections", corrections}};
}

std::optional<CheckOutcome> CheckOutcome::from_json(const json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("status")) {
        return std::nullopt;
    }
    CheckOutcome out;
    out.check = j.value("check", "");
    auto dim = j["dimension"].get<std::string>();
    if (dim == "knowledge_accuracy") {
        out.dimension = Dimension::knowledge_accuracy;
    } else if (dim == "fact_law_relevance") {
        out.dimension = Dimension::fact_law_relevance;
    } else if (dim == "procedural_compliance") {
        out.dimension = Dimension::procedural_compliance;
    } else {
        return std::nullopt;
    }
    try {
        out.status = check_status_from_string(j["status"].get<std::string>());
    } catch (const Error&) {
        return std::nullopt;
    }
    out.evidence = j.value("evidence", "");
    if (j.contains("corrections")) out.corrections = j["corrections"];
    return out;
}

std::optional<CheckStatus> parse_verdict_token(const std::string& reply) {
    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
        auto trimmed = text::trim(line);
        auto lower = text::to_lower(trimmed);
        if (lower.rfind("verdict:", 0) != 0) continue;
        auto token = text::trim(trimmed.substr(8));
        auto token_lower = text::to_lower(token);
        // Keep only the leading word.
        auto space = token_lower.find_first_of(" \t");
        if (space != std::string::npos) token_lower = token_lower.substr(0, space);
        if (token_lower == "verified") return CheckStatus::verified;
        if (token_lower == "refuted") return CheckStatus::refuted;
        if (token_lower == "inconclusive") return CheckStatus::inconclusive;
    }
    return std::nullopt;
}

namespace {

json get_arg(const json& args, std::initializer_list<const char*> names) {
    for (auto* n : names) {
        if (args.contains(n)) return args.at(n);
    }
    return json();
}

std::string string_arg(const json& args, std::initializer_list<const char*> names,
                       const std::string& fallback = "") {
    auto v = get_arg(args, names);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return fallback;
    return v.dump();
}

std::size_t topk_arg(const json& args, std::size_t fallback) {
    auto v = get_arg(args, {"topk", "top_k", "k"});
    if (v.is_number_integer() && v.get<int>() > 0) return static_cast<std::size_t>(v.get<int>());
    return fallback;
}

std::string model_reply(const ToolContext& ctx, const std::string& prompt_name,
                        const std::map<std::string, std::string>& vars) {
    if (!ctx.model) throw Error(ErrorCode::model_error, "no model client configured");
    std::string prompt = ctx.prompts && ctx.prompts->has(prompt_name)
                             ? ctx.prompts->render(prompt_name, vars)
                             : prompts::PromptLibrary::substitute(
                                   "{task}\n\nEnd with a line VERDICT: "
                                   "verified|refuted|inconclusive.",
                                   vars);
    std::vector<model::ChatMessage> messages{{"system", prompt}};
    return ctx.model->complete(messages);
}

// Resolves a law reference from check arguments: an explicit
// article_number wins, otherwise the number is parsed out of the law text
// ("Criminal Law Art.201").
struct ResolvedRef {
    std::string law_name;
    std::optional<int> number;
};

ResolvedRef resolve_ref(const json& args, std::initializer_list<const char*> text_keys) {
    ResolvedRef ref;
    auto law_text = string_arg(args, text_keys);
    auto parsed = kb::parse_article_ref(law_text);
    ref.law_name = parsed.law_name;
    ref.number = parsed.article_number;
    auto num = get_arg(args, {"article_number", "number"});
    if (num.is_number_integer()) ref.number = num.get<int>();
    return ref;
}

const kb::LawArticle* resolve_article(const kb::KnowledgeBase& base, const json& args,
                                      std::initializer_list<const char*> text_keys) {
    auto law_text = string_arg(args, text_keys);
    if (const auto* by_id = base.find_article_by_id(text::trim(law_text))) return by_id;
    auto ref = resolve_ref(args, text_keys);
    if (ref.number) {
        if (!ref.law_name.empty()) {
            return base.try_lookup_article(ref.law_name, *ref.number);
        }
        auto candidates = base.find_articles_by_number(*ref.number);
        if (candidates.size() == 1) return candidates.front();
    }
    return nullptr;
}

}  // namespace

CheckOutcome law_article_check(const ToolContext& ctx, const json& args) {
    CheckOutcome out;
    out.check = "law_article_check";
    out.dimension = Dimension::knowledge_accuracy;
    if (!ctx.kb) throw Error(ErrorCode::invalid_state, "no knowledge base in context");

    auto ref = resolve_ref(args, {"law_name", "law", "article"});
    if (ref.law_name.empty() && !ref.number) {
        throw Error(ErrorCode::invalid_argument, "law_name is empty");
    }

    const kb::LawArticle* article = nullptr;
    if (ref.number && !ref.law_name.empty()) {
        article = ctx.kb->try_lookup_article(ref.law_name, *ref.number);
        if (!article) {
            out.status = CheckStatus::refuted;
            out.evidence = "no such provision: " + ref.law_name + " art. " +
                           std::to_string(*ref.number) + " (possible fabrication)";
            return out;
        }
    } else if (ref.number) {
        auto candidates = ctx.kb->find_articles_by_number(*ref.number);
        if (candidates.empty()) {
            out.status = CheckStatus::refuted;
            out.evidence = "no provision numbered " + std::to_string(*ref.number) +
                           " in any indexed law (possible fabrication)";
            return out;
        }
        if (candidates.size() > 1) {
            out.status = CheckStatus::inconclusive;
            std::string names;
            for (auto* c : candidates) {
                if (!names.empty()) names += "; ";
                names += c->law_name;
            }
            out.evidence = "article number " + std::to_string(*ref.number) +
                           " exists in several laws, specify one: " + names;
            return out;
        }
        article = candidates.front();
    } else {
        // Law name only: confirm the law is indexed at all.
        if (ctx.kb->law_exists(ref.law_name)) {
            out.status = CheckStatus::inconclusive;
            out.evidence = "law '" + ref.law_name +
                           "' is indexed; provide an article number to verify content";
        } else {
            out.status = CheckStatus::refuted;
            out.evidence = "no indexed law named '" + ref.law_name + "'";
        }
        return out;
    }

    auto quoted = string_arg(args, {"quoted_text", "content", "quote"});
    if (!quoted.empty() &&
        text::normalize_loose(quoted) != text::normalize_loose(article->body)) {
        out.status = CheckStatus::refuted;
        out.evidence = "quoted text does not match the authoritative body of " +
                       article->law_name + " art. " + std::to_string(article->article_number);
        out.corrections["authoritative_body"] = article->body;
        out.corrections["article"] = article->to_json();
        return out;
    }

    out.status = CheckStatus::verified;
    out.evidence = article->law_name + " art. " + std::to_string(article->article_number) +
                   ": " + article->body;
    out.corrections["article"] = article->to_json();
    return out;
}

CheckOutcome fact_law_relevance_check(const ToolContext& ctx, const json& args) {
    CheckOutcome out;
    out.check = "fact_law_relevance_check";
    out.dimension = Dimension::fact_law_relevance;

    auto facts = string_arg(args, {"fact", "facts", "case_facts"});
    auto law = string_arg(args, {"law", "law_name", "article"});
    if (text::trim(facts).empty() || text::trim(law).empty()) {
        throw Error(ErrorCode::invalid_argument, "fact and law are both required");
    }

    // Ground the cited provision when it resolves, so the rubric sees the
    // authoritative text.
    std::string law_body = law;
    if (ctx.kb) {
        if (const auto* article = resolve_article(*ctx.kb, args, {"law", "law_name", "article"})) {
            law_body = article->law_name + " art. " + std::to_string(article->article_number) +
                       ": " + article->body;
        }
    }

    std::string reply;
    try {
        reply = model_reply(ctx, "rubric_fact_law", {{"facts", facts}, {"law", law_body}});
    } catch (const Error& e) {
        out.status = CheckStatus::inconclusive;
        out.evidence = std::string("analytical check unavailable: ") + e.what();
        return out;
    }

    // Element findings: one line per constitutive element, met or unmet.
    static const std::vector<std::string> kElements = {"subject", "object", "subjective",
                                                       "objective"};
    std::vector<std::string> findings;
    std::vector<std::string> unmet;
    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
        auto lower = text::to_lower(text::trim(line));
        for (auto& el : kElements) {
            if (lower.rfind(el, 0) != 0) continue;
            // "subjective"/"objective" also match the shorter prefixes;
            // require the element name to end at a word boundary.
            auto after = lower.substr(el.size());
            if (!after.empty() && std::isalpha(static_cast<unsigned char>(after[0]))) continue;
            findings.push_back(text::trim(line));
            if (lower.find("unmet") != std::string::npos ||
                lower.find("not met") != std::string::npos) {
                unmet.push_back(el);
            }
            break;
        }
    }

    auto verdict = parse_verdict_token(reply);
    if (!verdict) {
        out.status = CheckStatus::inconclusive;
        out.evidence = "no verdict token in analytical reply; raw output: " + reply;
        return out;
    }
    out.status = *verdict;
    std::string joined;
    for (auto& f : findings) {
        if (!joined.empty()) joined += "\n";
        joined += f;
    }
    out.evidence = joined.empty() ? reply : joined;
    if (!unmet.empty()) out.corrections["unmet_elements"] = unmet;
    return out;
}

CheckOutcome charge_law_consistency_check(const ToolContext& ctx, const json& args) {
    CheckOutcome out;
    out.check = "charge_law_consistency_check";
    out.dimension = Dimension::fact_law_relevance;
    if (!ctx.kb) throw Error(ErrorCode::invalid_state, "no knowledge base in context");

    auto charge_name = string_arg(args, {"charge", "charge_name"});
    const auto* charge = ctx.kb->resolve_charge(charge_name);
    if (!charge) {
        throw Error(ErrorCode::not_found, "unknown charge: " + charge_name);
    }

    const auto* mapped = ctx.kb->mapped_articles(charge->charge_id);
    if (mapped) {
        const auto* article = resolve_article(*ctx.kb, args, {"law", "law_name", "article"});
        std::string law_text = string_arg(args, {"law", "law_name", "article"});
        bool listed = false;
        if (article) {
            listed = std::find(mapped->begin(), mapped->end(), article->article_id) !=
                     mapped->end();
        }
        if (listed) {
            out.status = CheckStatus::verified;
            out.evidence = "charge '" + charge->name + "' is mapped to " + article->article_id;
            return out;
        }
        out.status = CheckStatus::refuted;
        out.evidence = "charge '" + charge->name + "' is not supported by '" + law_text + "'";
        out.corrections["mapped_articles"] = *mapped;
        return out;
    }

    // Unmapped charge: fall back to the analytical rubric.
    std::string reply;
    try {
        reply = model_reply(ctx, "rubric_charge_law",
                            {{"charge", charge->name},
                             {"law", string_arg(args, {"law", "law_name", "article"})}});
    } catch (const Error& e) {
        out.status = CheckStatus::inconclusive;
        out.evidence = std::string("charge is unmapped and the analytical check is unavailable: ") +
                       e.what();
        return out;
    }
    auto verdict = parse_verdict_token(reply);
    if (!verdict) {
        out.status = CheckStatus::inconclusive;
        out.evidence = "no verdict token in analytical reply; raw output: " + reply;
        return out;
    }
    out.status = *verdict;
    out.evidence = reply;
    return out;
}

json search_query_rewrite(const ToolContext& ctx, const json& args) {
    auto query = string_arg(args, {"query"});
    if (text::trim(query).empty()) {
        throw Error(ErrorCode::invalid_argument, "query is empty");
    }
    auto context_text = string_arg(args, {"context"});
    json out{{"original", query}};
    std::string reply;
    try {
        reply = model_reply(ctx, "rubric_query_rewrite",
                            {{"query", query}, {"context", context_text}});
    } catch (const Error& e) {
        out["query"] = query;
        out["rewritten"] = false;
        out["warning"] = std::string("rewrite unavailable, original query kept: ") + e.what();
        return out;
    }
    // First non-empty line is the rewrite.
    std::istringstream in(reply);
    std::string line, rewritten;
    while (std::getline(in, line)) {
        rewritten = text::trim(line);
        if (!rewritten.empty()) break;
    }
    if (rewritten.empty()) {
        out["query"] = query;
        out["rewritten"] = false;
        out["warning"] = "model returned an empty rewrite, original query kept";
        return out;
    }
    out["query"] = rewritten;
    out["rewritten"] = rewritten != query;
    return out;
}

CheckOutcome document_format_check(const ToolContext& ctx, const json& args) {
    CheckOutcome out;
    out.check = "document_format_check";
    out.dimension = Dimension::procedural_compliance;
    if (!ctx.kb) throw Error(ErrorCode::invalid_state, "no knowledge base in context");

    auto type = kb::template_type_from_string(
        string_arg(args, {"document_type", "template_type", "type"}));
    const auto& tpl = ctx.kb->get_template(type);
    auto document = string_arg(args, {"document", "text", "draft"});

    auto mandatory = tpl.mandatory_sections();
    auto detected = kb::detect_section_sequence(document, mandatory);

    std::vector<std::string> missing;
    for (auto& section : mandatory) {
        if (std::find(detected.begin(), detected.end(), section) == detected.end()) {
            missing.push_back(section);
        }
    }

    auto template_index = [&](const std::string& name) {
        return std::find(mandatory.begin(), mandatory.end(), name) - mandatory.begin();
    };
    std::vector<std::string> order_violations;
    for (std::size_t i = 0; i + 1 < detected.size(); ++i) {
        if (template_index(detected[i]) > template_index(detected[i + 1])) {
            order_violations.push_back("out of order: '" + detected[i] + "' before '" +
                                       detected[i + 1] + "'");
        }
    }

    json corrections = json::array();
    for (auto& m : missing) corrections.push_back("missing: " + m);
    for (auto& v : order_violations) corrections.push_back(v);

    if (missing.empty() && order_violations.empty()) {
        out.status = CheckStatus::verified;
        out.evidence = "all " + std::to_string(mandatory.size()) +
                       " mandatory sections present in template order";
    } else {
        out.status = CheckStatus::refuted;
        std::ostringstream ev;
        ev << missing.size() << " mandatory section(s) missing, " << order_violations.size()
           << " order violation(s)";
        out.evidence = ev.str();
        out.corrections = json{{"issues", corrections}};
    }

    // Optional analytical pass: revision suggestions on request only, so
    // scripted runs stay predictable.
    if (args.value("suggest", false) && ctx.model) {
        try {
            auto reply = model_reply(ctx, "rubric_doc_suggest",
                                     {{"document_type", kb::to_string(type)},
                                      {"document", document},
                                      {"issues", out.corrections.dump()}});
            out.corrections["suggestions"] = reply;
        } catch (const Error&) {
            // Suggestions are best-effort; the rule-based outcome stands.
        }
    }
    return out;
}

CheckOutcome procedure_check(const ToolContext& ctx, const json& args) {
    CheckOutcome out;
    out.check = "procedure_check";
    out.dimension = Dimension::procedural_compliance;
    if (!ctx.court) {
        throw Error(ErrorCode::invalid_state, "no active court scenario state");
    }
    auto requested = string_arg(args, {"court_type", "type"});
    if (!requested.empty()) {
        auto type = kb::court_type_from_string(requested);
        if (type != ctx.court->spec().court_type) {
            throw Error(ErrorCode::invalid_argument,
                        "court_type '" + requested + "' does not match the active " +
                            kb::to_string(ctx.court->spec().court_type) + " court");
        }
    }

    const auto& machine = *ctx.court;
    auto snapshot = machine.completion_snapshot();
    std::size_t current = machine.current_stage();
    const auto& spec = machine.spec();

    std::vector<std::string> problems;
    for (auto& e : machine.event_log()) {
        if (e.kind == "out_of_order_rejected") {
            problems.push_back("out-of-order attempt: action '" + e.action + "' of stage '" +
                               e.stage + "' (" + e.detail + ")");
        } else if (e.kind == "advance_rejected") {
            problems.push_back("premature advance from stage '" + e.stage + "' (" + e.detail +
                               ")");
        } else if (e.kind == "invalid_action_rejected") {
            problems.push_back("unknown action '" + e.action + "'");
        }
    }

    // Guidance: what must happen next.
    std::vector<std::string> next_actions;
    auto missing = machine.missing_actions(current);
    std::size_t guidance_stage = current;
    if (missing.empty() && current + 1 < spec.stages.size()) {
        guidance_stage = current + 1;
        missing = machine.missing_actions(guidance_stage);
    }
    for (auto& m : missing) next_actions.push_back(m);

    std::ostringstream ev;
    ev << "current stage " << (current + 1) << "/" << spec.stages.size() << " ('"
       << spec.stages[current].name << "'); " << snapshot.total_completed << "/"
       << snapshot.total_mandatory << " mandatory actions completed";
    if (!problems.empty()) {
        ev << "; violations: ";
        for (std::size_t i = 0; i < problems.size(); ++i) {
            if (i) ev << "; ";
            ev << problems[i];
        }
    }
    out.evidence = ev.str();
    out.corrections["next_required_actions"] = next_actions;
    out.corrections["next_stage"] = spec.stages[guidance_stage].name;
    out.status = problems.empty() ? CheckStatus::verified : CheckStatus::refuted;
    return out;
}

json writing_plan_generation(const ToolContext& ctx, const json& args) {
    if (!ctx.kb) throw Error(ErrorCode::invalid_state, "no knowledge base in context");
    auto type = kb::template_type_from_string(string_arg(args, {"document_type", "type"}));
    const auto& tpl = ctx.kb->get_template(type);

    std::string section_list;
    for (auto& s : tpl.sections) {
        section_list += "- " + s.name +
                        (s.requirement == kb::Requirement::mandatory ? " (mandatory)" : "") +
                        ": " + s.guidance + "\n";
    }

    std::vector<std::string> steps;
    std::string note;
    try {
        auto reply = model_reply(ctx, "rubric_plan",
                                 {{"document_type", kb::to_string(type)},
                                  {"sections", section_list}});
        std::istringstream in(reply);
        std::string line;
        while (std::getline(in, line)) {
            auto t = text::trim(line);
            if (t.empty()) continue;
            // Accept "1. step", "- step", "* step".
            if (std::isdigit(static_cast<unsigned char>(t[0]))) {
                auto dot = t.find_first_of(".)");
                if (dot != std::string::npos) t = text::trim(t.substr(dot + 1));
                steps.push_back(t);
            } else if (t[0] == '-' || t[0] == '*') {
                steps.push_back(text::trim(t.substr(1)));
            }
        }
    } catch (const Error& e) {
        note = std::string("plan seeded from template only: ") + e.what();
    }

    if (steps.empty()) {
        for (auto& s : tpl.sections) {
            steps.push_back("Draft the " + s.name + " section: " + s.guidance);
        }
    }

    // Every mandatory section must be covered by at least one step.
    for (auto& name : tpl.mandatory_sections()) {
        auto want = text::normalize_loose(name);
        bool covered = false;
        for (auto& step : steps) {
            if (text::normalize_loose(step).find(want) != std::string::npos) {
                covered = true;
                break;
            }
        }
        if (!covered) steps.push_back("Draft the " + name + " section.");
    }

    json out{{"document_type", kb::to_string(type)}, {"plan", steps}};
    if (!note.empty()) out["note"] = note;
    return out;
}

namespace {

ArgSpec arg(std::string name, ValueKind kind, bool required,
            std::vector<std::string> aliases = {}) {
    return ArgSpec{std::move(name), kind, required, std::move(aliases)};
}

}  // namespace

ToolRegistry::ToolRegistry() {
    auto add = [&](ToolSpec spec) {
        spec.schema.tool = spec.name;
        by_name_[spec.name] = specs_.size();
        specs_.push_back(std::move(spec));
    };

    // Exploration
    add({"law_retrieval", Category::exploration, Grounding::grounded,
         "Retrieve the most relevant law articles for a query.",
         {"", {arg("query", ValueKind::string, true), arg("topk", ValueKind::integer, false)}},
         "ranked law articles with scores"});
    add({"law_recommendation", Category::exploration, Grounding::grounded,
         "Recommend law articles similar to a given one.",
         {"", {arg("law", ValueKind::string, true, {"article_id", "article"}),
               arg("topk", ValueKind::integer, false)}},
         "ranked similar articles"});
    add({"charge_expansion", Category::exploration, Grounding::grounded,
         "Expand a list of charges with related ones.",
         {"", {arg("charges", ValueKind::array, true, {"charge_names"}),
               arg("topk", ValueKind::integer, false)}},
         "related charges with shared-article counts"});
    add({"case_retrieval", Category::exploration, Grounding::grounded,
         "Retrieve similar civil or criminal cases.",
         {"", {arg("case_type", ValueKind::string, true, {"type"}),
               arg("query", ValueKind::string, true), arg("topk", ValueKind::integer, false)}},
         "ranked case records"});
    add({"template_retrieval", Category::exploration, Grounding::grounded,
         "Fetch a legal document template.",
         {"", {arg("template_type", ValueKind::string, true, {"type"})}},
         "document template with sections"});
    add({"writing_plan_generation", Category::exploration, Grounding::analytical,
         "Generate a writing plan for a document type.",
         {"", {arg("document_type", ValueKind::string, true, {"type"})}},
         "ordered plan steps covering every mandatory section"});
    add({"procedure_retrieval", Category::exploration, Grounding::grounded,
         "Retrieve the court procedure (stage=0 for the full procedure).",
         {"", {arg("court_type", ValueKind::string, true, {"type"}),
               arg("stage", ValueKind::integer, false)}},
         "procedure stages and mandatory actions"});

    // Checking
    add({"law_article_check", Category::checking, Grounding::grounded,
         "Verify a cited law article against the statute database.",
         {"", {arg("law_name", ValueKind::string, true, {"law", "article"}),
               arg("article_number", ValueKind::integer, false, {"number"}),
               arg("quoted_text", ValueKind::string, false, {"content", "quote"})}},
         "check outcome with the authoritative body"});
    add({"fact_law_relevance_check", Category::checking, Grounding::analytical,
         "Check whether a provision applies to the case facts.",
         {"", {arg("fact", ValueKind::string, true, {"facts", "case_facts"}),
               arg("law", ValueKind::string, true, {"law_name", "article"})}},
         "check outcome with per-element findings"});
    add({"charge_law_consistency_check", Category::checking, Grounding::grounded,
         "Check whether a charge is legally supported by a statute.",
         {"", {arg("charge", ValueKind::string, true, {"charge_name"}),
               arg("law", ValueKind::string, true, {"law_name", "article"})}},
         "check outcome with the mapped articles"});
    add({"search_query_rewrite", Category::checking, Grounding::analytical,
         "Rewrite a retrieval query that returned poor results.",
         {"", {arg("query", ValueKind::string, true),
               arg("context", ValueKind::string, false)}},
         "refined query"});
    add({"document_format_check", Category::checking, Grounding::grounded,
         "Check a drafted document against its template structure.",
         {"", {arg("document_type", ValueKind::string, true, {"template_type", "type"}),
               arg("document", ValueKind::string, true, {"text", "draft"})}},
         "check outcome listing missing or misordered sections"});
    add({"procedure_check", Category::checking, Grounding::grounded,
         "Check procedural compliance of the active court episode.",
         {"", {arg("court_type", ValueKind::string, true, {"type"})}},
         "check outcome with the next required actions"});

    // Memory
    add({"memory_store", Category::memory, Grounding::grounded,
         "Store knowledge or context in episode memory.",
         {"", {arg("memory_type", ValueKind::string, true, {"channel"}),
               arg("content", ValueKind::any, true)}},
         "stored entry id"});
    add({"memory_fetch", Category::memory, Grounding::grounded,
         "Retrieve stored memory, optionally ranked by a query.",
         {"", {arg("memory_type", ValueKind::string, true, {"channel"}),
               arg("query", ValueKind::string, false),
               arg("topk", ValueKind::integer, false)}},
         "memory entries"});

    // Wire-dialect aliases.
    aliases_ = {
        {"storeMemory", "memory_store"},
        {"fetchMemory", "memory_fetch"},
        {"law_check", "law_article_check"},
        {"plan_generation", "writing_plan_generation"},
        {"law_query_rewrite", "search_query_rewrite"},
        {"crime_law_consistency_check", "charge_law_consistency_check"},
    };
}

const ToolSpec* ToolRegistry::find(const std::string& name_or_alias) const {
    auto canon = canonical_name(name_or_alias);
    auto it = by_name_.find(canon);
    if (it == by_name_.end()) return nullptr;
    return &specs_[it->second];
}

std::string ToolRegistry::canonical_name(const std::string& name_or_alias) const {
    auto alias = aliases_.find(name_or_alias);
    if (alias != aliases_.end()) return alias->second;
    return name_or_alias;
}

protocol::SchemaMap ToolRegistry::schema_map() const {
    protocol::SchemaMap map;
    for (auto& spec : specs_) map[spec.name] = spec.schema;
    for (auto& [alias, canon] : aliases_) {
        auto schema = map.at(canon);
        schema.tool = alias;
        map[alias] = schema;
    }
    return map;
}

std::size_t ToolRegistry::count(Category c) const {
    return static_cast<std::size_t>(
        std::count_if(specs_.begin(), specs_.end(),
                      [&](const ToolSpec& s) { return s.category == c; }));
}

json ToolRegistry::manifest() const {
    json tools_json = json::array();
    for (auto& spec : specs_) {
        json inputs = json::array();
        for (auto& a : spec.schema.args) {
            inputs.push_back({{"name", a.name},
                              {"kind", protocol::to_string(a.kind)},
                              {"required", a.required},
                              {"aliases", a.aliases}});
        }
        tools_json.push_back({{"name", spec.name},
                              {"category", to_string(spec.category)},
                              {"grounding", to_string(spec.grounding)},
                              {"description", spec.description},
                              {"inputs", inputs},
                              {"output", spec.output}});
    }
    return json{{"tools", tools_json}, {"aliases", aliases_}};
}

protocol::ToolResult ToolRegistry::invoke(const std::string& name, const json& arguments,
                                          ToolContext& ctx) const {
    const auto* spec = find(name);
    if (!spec) {
        return ToolResult::error("tool_not_found", "no such tool: " + name);
    }
    try {
        const auto& canon = spec->name;
        if (!ctx.kb && spec->category != Category::memory && canon != "search_query_rewrite" &&
            canon != "fact_law_relevance_check") {
            throw Error(ErrorCode::invalid_state, "no knowledge base in context");
        }

        if (canon == "law_retrieval") {
            auto query = string_arg(arguments, {"query"});
            auto results = ctx.kb->search_articles(query, topk_arg(arguments, ctx.default_topk));
            json articles = json::array();
            for (auto& r : results) {
                auto a = r.article->to_json();
                a["score"] = r.score;
                articles.push_back(std::move(a));
            }
            return ToolResult::ok(json{{"query", query},
                                       {"count", articles.size()},
                                       {"articles", articles}});
        }
        if (canon == "law_recommendation") {
            const auto* article = resolve_article(*ctx.kb, arguments,
                                                  {"law", "article_id", "article"});
            if (!article) {
                throw Error(ErrorCode::not_found,
                            "cannot resolve article reference: " +
                                string_arg(arguments, {"law", "article_id", "article"}));
            }
            auto results =
                ctx.kb->similar_articles(article->article_id, topk_arg(arguments, ctx.default_topk));
            json related = json::array();
            for (auto& r : results) {
                auto a = r.article->to_json();
                a["score"] = r.score;
                related.push_back(std::move(a));
            }
            return ToolResult::ok(json{{"base", article->article_id},
                                       {"count", related.size()},
                                       {"related", related}});
        }
        if (canon == "charge_expansion") {
            auto charges_arg = get_arg(arguments, {"charges", "charge_names"});
            std::vector<std::string> names;
            if (charges_arg.is_array()) {
                for (auto& c : charges_arg) names.push_back(c.get<std::string>());
            } else if (charges_arg.is_string()) {
                names.push_back(charges_arg.get<std::string>());
            }
            if (names.empty()) {
                throw Error(ErrorCode::invalid_argument, "charges list is empty");
            }
            auto results = ctx.kb->expand_charges(names, topk_arg(arguments, ctx.default_topk));
            json out = json::array();
            for (auto& [charge, overlap] : results) {
                auto c = charge->to_json();
                c["shared_articles"] = overlap;
                out.push_back(std::move(c));
            }
            return ToolResult::ok(json{{"count", out.size()}, {"charges", out}});
        }
        if (canon == "case_retrieval") {
            auto type = kb::case_type_from_string(string_arg(arguments, {"case_type", "type"}));
            auto query = string_arg(arguments, {"query"});
            auto results = ctx.kb->search_cases(type, query, topk_arg(arguments, ctx.default_topk));
            json cases = json::array();
            for (auto& r : results) {
                auto c = r.record->to_json();
                c["score"] = r.score;
                cases.push_back(std::move(c));
            }
            return ToolResult::ok(json{{"count", cases.size()}, {"cases", cases}});
        }
        if (canon == "template_retrieval") {
            auto type = kb::template_type_from_string(
                string_arg(arguments, {"template_type", "type"}));
            return ToolResult::ok(ctx.kb->get_template(type).to_json());
        }
        if (canon == "writing_plan_generation") {
            return ToolResult::ok(writing_plan_generation(ctx, arguments));
        }
        if (canon == "procedure_retrieval") {
            auto type = kb::court_type_from_string(string_arg(arguments, {"court_type", "type"}));
            int stage = 0;
            auto stage_arg = get_arg(arguments, {"stage"});
            if (stage_arg.is_number_integer()) stage = stage_arg.get<int>();
            if (stage < 0) {
                throw Error(ErrorCode::invalid_argument, "stage must be non-negative");
            }
            return ToolResult::ok(ctx.kb->get_procedure_json(type, static_cast<std::size_t>(stage)));
        }
        if (canon == "law_article_check") {
            return ToolResult::ok(law_article_check(ctx, arguments).to_json());
        }
        if (canon == "fact_law_relevance_check") {
            return ToolResult::ok(fact_law_relevance_check(ctx, arguments).to_json());
        }
        if (canon == "charge_law_consistency_check") {
            return ToolResult::ok(charge_law_consistency_check(ctx, arguments).to_json());
        }
        if (canon == "search_query_rewrite") {
            return ToolResult::ok(search_query_rewrite(ctx, arguments));
        }
        if (canon == "document_format_check") {
            return ToolResult::ok(document_format_check(ctx, arguments).to_json());
        }
        if (canon == "procedure_check") {
            return ToolResult::ok(procedure_check(ctx, arguments).to_json());
        }
        if (canon == "memory_store") {
            if (!ctx.memory) throw Error(ErrorCode::invalid_state, "no memory store in context");
            auto channel = memory::channel_from_string(
                string_arg(arguments, {"memory_type", "channel"}));
            auto content_arg = get_arg(arguments, {"content"});
            std::string content =
                content_arg.is_string() ? content_arg.get<std::string>() : content_arg.dump();
            if (text::trim(content).empty()) {
                throw Error(ErrorCode::invalid_argument, "content is empty");
            }
            if (channel == memory::Channel::legal_knowledge &&
                ctx.caller == memory::Writer::verifier && ctx.knowledge_sink) {
                ctx.knowledge_sink->push_back({content, ctx.round_index});
                return ToolResult::ok(json{{"status", "pending_verification"},
                                           {"channel", to_string(channel)}});
            }
            auto id = ctx.memory->store(channel, content, ctx.caller,
                                        channel == memory::Channel::legal_knowledge
                                            ? ctx.assessment_ref
                                            : std::nullopt,
                                        ctx.round_index);
            return ToolResult::ok(json{{"status", "stored"},
                                       {"entry_id", id},
                                       {"channel", to_string(channel)}});
        }
        if (canon == "memory_fetch") {
            if (!ctx.memory) throw Error(ErrorCode::invalid_state, "no memory store in context");
            auto channel = memory::channel_from_string(
                string_arg(arguments, {"memory_type", "channel"}));
            std::optional<std::string> query;
            auto q = get_arg(arguments, {"query"});
            if (q.is_string() && !text::trim(q.get<std::string>()).empty()) {
                query = q.get<std::string>();
            }
            std::optional<std::size_t> topk;
            auto k = get_arg(arguments, {"topk", "top_k", "k"});
            if (k.is_number_integer() && k.get<int>() > 0) {
                topk = static_cast<std::size_t>(k.get<int>());
            }
            auto entries = ctx.memory->fetch(channel, query, topk);
            json out = json::array();
            for (auto& e : entries) out.push_back(e.to_json());
            return ToolResult::ok(json{{"count", out.size()}, {"entries", out}});
        }
        return ToolResult::error("tool_not_found", "no such tool: " + name);
    } catch (const Error& e) {
        return ToolResult::error(std::string(e.code_name()), e.what());
    } catch (const json::exception& e) {
        return ToolResult::error("invalid_argument", e.what());
    }
}

}  // namespace juris::tools
