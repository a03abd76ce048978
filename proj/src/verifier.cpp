#include "juris/verifier.hpp"

#include <sstream>

#include "juris/errors.hpp"
#include "juris/text.hpp"

namespace juris::verifier {

using tools::CheckStatus;

std::string to_string(Recommendation r) {
    switch (r) {
        case Recommendation::proceed: return "proceed";
        case Recommendation::revise: return "revise";
        case Recommendation::re_explore: return "re_explore";
    }
    return "proceed";
}

std::optional<Recommendation> recommendation_from_string(const std::string& s) {
    auto v = text::normalize_law_name(s);
    if (v == "proceed") return Recommendation::proceed;
    if (v == "revise") return Recommendation::revise;
    if (v == "re_explore" || v == "re-explore" || v == "reexplore") {
        return Recommendation::re_explore;
    }
    return std::nullopt;
}

namespace {

int severity(CheckStatus s) {
    switch (s) {
        case CheckStatus::verified: return 0;
        case CheckStatus::inconclusive: return 1;
        case CheckStatus::refuted: return 2;
    }
    return 1;
}

CheckStatus worst(CheckStatus a, CheckStatus b) {
    return severity(a) >= severity(b) ? a : b;
}

int strictness(Recommendation r) {
    switch (r) {
        case Recommendation::proceed: return 0;
        case Recommendation::revise: return 1;
        case Recommendation::re_explore: return 2;
    }
    return 0;
}

std::optional<Recommendation> parse_recommendation_line(const std::string& reply) {
    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
        auto lower = text::to_lower(text::trim(line));
        if (lower.rfind("recommendation:", 0) != 0) continue;
        auto token = text::trim(lower.substr(15));
        auto space = token.find_first_of(" \t");
        if (space != std::string::npos) token = token.substr(0, space);
        if (auto rec = recommendation_from_string(token)) return rec;
    }
    return std::nullopt;
}

}  // namespace

std::pair<Triple, Recommendation> aggregate(const std::vector<tools::CheckOutcome>& outcomes) {
    Triple triple;
    bool saw_accuracy = false, saw_relevance = false, saw_compliance = false;
    for (auto& o : outcomes) {
        switch (o.dimension) {
            case tools::Dimension::knowledge_accuracy:
                triple.accuracy = saw_accuracy ? worst(triple.accuracy, o.status) : o.status;
                saw_accuracy = true;
                break;
            case tools::Dimension::fact_law_relevance:
                triple.relevance = saw_relevance ? worst(triple.relevance, o.status) : o.status;
                saw_relevance = true;
                break;
            case tools::Dimension::procedural_compliance:
                triple.compliance = saw_compliance ? worst(triple.compliance, o.status) : o.status;
                saw_compliance = true;
                break;
        }
    }
    Recommendation rec = Recommendation::proceed;
    if (triple.accuracy == CheckStatus::refuted || triple.relevance == CheckStatus::refuted) {
        rec = Recommendation::re_explore;
    } else if (triple.compliance == CheckStatus::refuted) {
        rec = Recommendation::revise;
    }
    return {triple, rec};
}

json Assessment::feedback_json() const {
    json corrections = json::array();
    for (auto& o : dimension_details) {
        if (!o.corrections.empty()) {
            corrections.push_back(json{{"check", o.check}, {"corrections", o.corrections}});
        }
    }
    json j{{"assessment_id", assessment_id},
           {"accuracy", tools::to_string(accuracy)},
           {"relevance", tools::to_string(relevance)},
           {"compliance", tools::to_string(compliance)},
           {"recommendation", to_string(recommendation)},
           {"corrections", corrections}};
    if (!notes.empty()) j["notes"] = notes;
    return j;
}

json Assessment::to_json() const {
    json details = json::array();
    for (auto& o : dimension_details) details.push_back(o.to_json());
    json transcript_json = json::array();
    for (auto& m : transcript) transcript_json.push_back(m.to_json());
    return json{{"assessment_id", assessment_id},
                {"step_ref", step_ref},
                {"accuracy", tools::to_string(accuracy)},
                {"relevance", tools::to_string(relevance)},
                {"compliance", tools::to_string(compliance)},
                {"recommendation", to_string(recommendation)},
                {"dimension_details", details},
                {"memory_writes", memory_writes},
                {"notes", notes},
                {"transcript", transcript_json}};
}

Verifier::Verifier(std::shared_ptr<model::ModelClient> client,
                   const tools::ToolRegistry* registry, const prompts::PromptLibrary* prompts,
                   VerifierConfig config)
    : client_(std::move(client)), registry_(registry), prompts_(prompts), config_(config) {}

Assessment Verifier::verify(const StepView& step, tools::ToolContext& episode_ctx,
                            const std::string& assessment_id) const {
    Assessment assessment;
    assessment.assessment_id = assessment_id;
    assessment.step_ref = step.step_index;

    // Isolated context: the verifier never sees the main chain beyond the
    // current step.
    std::string system_prompt =
        prompts_ && prompts_->has("verifier_instruction")
            ? prompts_->get("verifier_instruction")
            : "You verify one exploration step. Call checking tools, then finish with "
              "a line RECOMMENDATION: proceed|revise|re_explore.";

    std::ostringstream seed;
    seed << "User message:\n" << step.user_message << "\n\n";
    seed << "Reasoning step under review:\n" << step.reasoning_text << "\n\n";
    seed << "Exploration call: " << protocol::render_call(step.call) << "\n";
    seed << "Exploration result: " << protocol::render_result(step.result) << "\n";

    std::vector<model::ChatMessage> messages{{"system", system_prompt},
                                             {"user", seed.str()}};
    assessment.transcript = messages;

    // Verifier-side tool context: same episode state, verifier role, and a
    // sink that defers legal-knowledge writes until the outcome is known.
    std::vector<tools::PendingKnowledgeWrite> knowledge_queue;
    tools::ToolContext ctx = episode_ctx;
    ctx.model = client_.get();
    ctx.caller = memory::Writer::verifier;
    ctx.knowledge_sink = &knowledge_queue;
    ctx.assessment_ref = assessment_id;

    std::vector<tools::CheckOutcome> outcomes;
    std::optional<Recommendation> stated_rec;
    bool budget_exceeded = false;
    int checks_used = 0;

    for (int turn = 0; turn < config_.max_turns; ++turn) {
        auto reply = client_->complete(messages);
        messages.push_back({"assistant", reply});
        assessment.transcript.push_back({"assistant", reply});

        auto segments = protocol::parse_turn(reply);
        const protocol::TurnSegment* first_call = nullptr;
        int extra_calls = 0;
        for (auto& seg : segments) {
            if (seg.kind == protocol::SegmentKind::tool_call) {
                if (!first_call) {
                    first_call = &seg;
                } else {
                    ++extra_calls;
                }
            }
        }
        if (!first_call) {
            stated_rec = parse_recommendation_line(reply);
            break;
        }

        const auto* spec = registry_->find(first_call->call->name);
        protocol::ToolResult result;
        if (!spec) {
            result = protocol::ToolResult::error("tool_not_found",
                                                 "no such tool: " + first_call->call->name);
        } else if (spec->category == tools::Category::exploration) {
            result = protocol::ToolResult::error(
                "invalid_state", "exploration tools are not available during verification");
        } else {
            if (spec->category == tools::Category::checking) {
                if (checks_used >= config_.check_budget) {
                    budget_exceeded = true;
                    assessment.notes.push_back(
                        "check budget exhausted (" + std::to_string(config_.check_budget) +
                        " checking-tool calls); assessment forced inconclusive");
                    break;
                }
                ++checks_used;
            }
            result = registry_->invoke(first_call->call->name, first_call->call->arguments, ctx);
            if (spec->category == tools::Category::checking && !result.is_error) {
                if (auto outcome = tools::CheckOutcome::from_json(result.payload)) {
                    outcomes.push_back(*outcome);
                }
            }
        }

        auto feedback = protocol::render_result(result);
        if (extra_calls > 0) {
            feedback += "\n[note] additional tool calls ignored: one tool call per turn";
        }
        messages.push_back({"user", feedback});
        assessment.transcript.push_back({"user", feedback});
    }

    if (budget_exceeded) {
        assessment.accuracy = CheckStatus::inconclusive;
        assessment.relevance = CheckStatus::inconclusive;
        assessment.compliance = CheckStatus::inconclusive;
        assessment.recommendation = Recommendation::re_explore;
        assessment.dimension_details = outcomes;
        return assessment;
    }

    auto [triple, derived_rec] = aggregate(outcomes);
    assessment.accuracy = triple.accuracy;
    assessment.relevance = triple.relevance;
    assessment.compliance = triple.compliance;
    assessment.dimension_details = outcomes;

    // A stated recommendation can only tighten the aggregate, never relax
    // it below what a refuted dimension demands.
    assessment.recommendation = derived_rec;
    if (stated_rec && strictness(*stated_rec) > strictness(derived_rec)) {
        assessment.recommendation = *stated_rec;
    }

    // Commit legal knowledge only behind a verified accuracy dimension.
    if (assessment.accuracy == CheckStatus::verified && episode_ctx.memory) {
        for (auto& o : outcomes) {
            if (o.dimension == tools::Dimension::knowledge_accuracy &&
                o.status == CheckStatus::verified) {
                json content{{"source", o.check}, {"content", o.evidence}};
                auto id = episode_ctx.memory->store(memory::Channel::legal_knowledge,
                                                    content.dump(), memory::Writer::verifier,
                                                    assessment_id, episode_ctx.round_index);
                assessment.memory_writes.push_back(id);
            }
        }
        for (auto& pending : knowledge_queue) {
            auto id = episode_ctx.memory->store(memory::Channel::legal_knowledge,
                                                pending.content, memory::Writer::verifier,
                                                assessment_id, pending.round_index);
            assessment.memory_writes.push_back(id);
        }
    } else if (!knowledge_queue.empty()) {
        assessment.notes.push_back(
            "dropped " + std::to_string(knowledge_queue.size()) +
            " queued legal_knowledge write(s): accuracy was not verified");
    }

    return assessment;
}

}  // namespace juris::verifier
