#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "juris/kb.hpp"
#include "juris/memory.hpp"
#include "juris/model_client.hpp"
#include "juris/prompts.hpp"
#include "juris/protocol.hpp"
#include "juris/scenarios.hpp"

namespace juris::tools {

using json = nlohmann::json;

enum class Category { exploration, checking, memory };
enum class Grounding { grounded, analytical };
enum class Dimension { knowledge_accuracy, fact_law_relevance, procedural_compliance };
enum class CheckStatus { verified, refuted, inconclusive };

std::string to_string(Category c);
std::string to_string(Grounding g);
std::string to_string(Dimension d);
std::string to_string(CheckStatus s);
CheckStatus check_status_from_string(const std::string& s);

// Structured output of one checking tool.
struct CheckOutcome {
    std::string check;  // canonical tool name
    Dimension dimension = Dimension::knowledge_accuracy;
    CheckStatus status = CheckStatus::inconclusive;
    std::string evidence;
    json corrections = json::object();

    json to_json() const;
    static std::optional<CheckOutcome> from_json(const json& j);
};

struct ToolSpec {
    std::string name;
    Category category = Category::exploration;
    Grounding grounding = Grounding::grounded;
    std::string description;
    protocol::CallSchema schema;
    std::string output;  // short output description for the manifest
};

// Deferred legal-knowledge write, committed by the verifier once the
// assessment's accuracy dimension is verified.
struct PendingKnowledgeWrite {
    std::string content;
    int round_index = 0;
};

// Everything a tool implementation may touch. Pointers may be null; tools
// that need a missing dependency return an error result.
struct ToolContext {
    const kb::KnowledgeBase* kb = nullptr;
    memory::MemoryStore* memory = nullptr;
    model::ModelClient* model = nullptr;
    scenarios::CourtStateMachine* court = nullptr;
    const prompts::PromptLibrary* prompts = nullptr;
    memory::Writer caller = memory::Writer::main_agent;
    // When set (verifier context), legal_knowledge stores are queued here
    // instead of committed, pending the assessment outcome.
    std::vector<PendingKnowledgeWrite>* knowledge_sink = nullptr;
    // Verification ref attached to directly committed legal_knowledge
    // writes (verifier without a sink).
    std::optional<std::string> assessment_ref;
    int round_index = 0;
    std::size_t default_topk = 5;
};

// The registry holds exactly 7 exploration, 6 checking and 2 memory tools
// under their canonical names, plus the wire-dialect aliases.
class ToolRegistry {
public:
    ToolRegistry();

    // Resolves canonical names and aliases; nullptr when unknown.
    const ToolSpec* find(const std::string& name_or_alias) const;
    std::string canonical_name(const std::string& name_or_alias) const;

    const std::vector<ToolSpec>& specs() const { return specs_; }
    const std::map<std::string, std::string>& aliases() const { return aliases_; }

    // Schema map covering canonical names and aliases, for validate_call.
    protocol::SchemaMap schema_map() const;

    // Machine-readable manifest of every tool's inputs and outputs.
    json manifest() const;

    // Dispatches a validated call. Unknown names yield a tool_not_found
    // error result; tool failures come back as error results carrying the
    // machine-readable code.
    protocol::ToolResult invoke(const std::string& name, const json& arguments,
                                ToolContext& ctx) const;

    std::size_t count(Category c) const;

private:
    std::vector<ToolSpec> specs_;
    std::map<std::string, std::size_t> by_name_;
    std::map<std::string, std::string> aliases_;
};

// Checking-tool implementations (also reachable through invoke).
CheckOutcome law_article_check(const ToolContext& ctx, const json& args);
CheckOutcome fact_law_relevance_check(const ToolContext& ctx, const json& args);
CheckOutcome charge_law_consistency_check(const ToolContext& ctx, const json& args);
CheckOutcome document_format_check(const ToolContext& ctx, const json& args);
CheckOutcome procedure_check(const ToolContext& ctx, const json& args);
json search_query_rewrite(const ToolContext& ctx, const json& args);
json writing_plan_generation(const ToolContext& ctx, const json& args);

// Finds the declared `VERDICT: <status>` token line in an analytical model
// reply.
std::optional<CheckStatus> parse_verdict_token(const std::string& reply);

}  // namespace juris::tools
