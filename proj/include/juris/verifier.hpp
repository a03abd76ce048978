#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "juris/model_client.hpp"
#include "juris/prompts.hpp"
#include "juris/protocol.hpp"
#include "juris/tools.hpp"

namespace juris::verifier {

using json = nlohmann::json;

enum class Recommendation { proceed, revise, re_explore };

std::string to_string(Recommendation r);
std::optional<Recommendation> recommendation_from_string(const std::string& s);

// The structured triple produced for one exploration step, plus the routing
// recommendation and an audit transcript of the verification run.
struct Assessment {
    std::string assessment_id;
    int step_ref = 0;
    tools::CheckStatus accuracy = tools::CheckStatus::inconclusive;
    tools::CheckStatus relevance = tools::CheckStatus::inconclusive;
    tools::CheckStatus compliance = tools::CheckStatus::inconclusive;
    std::vector<tools::CheckOutcome> dimension_details;
    Recommendation recommendation = Recommendation::proceed;
    std::vector<std::uint64_t> memory_writes;
    std::vector<std::string> notes;
    std::vector<model::ChatMessage> transcript;

    // Compact form injected into the main reasoning chain.
    json feedback_json() const;
    json to_json() const;
};

struct Triple {
    tools::CheckStatus accuracy = tools::CheckStatus::inconclusive;
    tools::CheckStatus relevance = tools::CheckStatus::inconclusive;
    tools::CheckStatus compliance = tools::CheckStatus::inconclusive;
};

// Per dimension the worst status wins (refuted > inconclusive > verified);
// unexamined dimensions stay inconclusive. Any refuted accuracy or
// relevance routes to re_explore, refuted compliance alone to revise,
// otherwise proceed.
std::pair<Triple, Recommendation> aggregate(const std::vector<tools::CheckOutcome>& outcomes);

struct VerifierConfig {
    int check_budget = 4;   // checking-tool calls per assessment
    int max_turns = 12;     // hard bound on verifier model turns
};

struct StepView {
    int step_index = 0;
    std::string user_message;    // the user's last message this round
    std::string reasoning_text;  // the step's reasoning segment
    protocol::ToolCall call;
    protocol::ToolResult result;
};

// Runs one verification in a fresh model context seeded only with the
// verifier prompt and the step view, never the main agent's full reasoning.
// The verifier model may call checking and memory tools; legal-knowledge
// stores are committed only when the final accuracy dimension is verified.
class Verifier {
public:
    Verifier(std::shared_ptr<model::ModelClient> client, const tools::ToolRegistry* registry,
             const prompts::PromptLibrary* prompts, VerifierConfig config = {});

    Assessment verify(const StepView& step, tools::ToolContext& episode_ctx,
                      const std::string& assessment_id) const;

    const VerifierConfig& config() const { return config_; }

private:
    std::shared_ptr<model::ModelClient> client_;
    const tools::ToolRegistry* registry_;
    const prompts::PromptLibrary* prompts_;
    VerifierConfig config_;
};

}  // namespace juris::verifier
