#pragma once

#include <filesystem>
#include <memory>
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
#include "juris/tools.hpp"
#include "juris/verifier.hpp"

namespace juris::controller {

using json = nlohmann::json;

enum class StepKind { exploration, memory, checking };

std::string to_string(StepKind k);

// One executed tool call. Exploration steps close a reasoning segment and
// always carry an assessment; memory and checking calls are recorded
// without one.
struct StepRecord {
    int step_index = 0;
    StepKind kind = StepKind::exploration;
    std::string reasoning_text;
    protocol::ToolCall tool_call;
    protocol::ToolResult result;
    std::optional<verifier::Assessment> assessment;

    json to_json() const;
};

// Message-log entry kept for auditing; `content` is exactly what the model
// saw or produced.
struct LoggedMessage {
    std::string role;
    std::string content;
    std::string meta;        // incoming | assistant_turn | tool_result |
                             // exploration_feedback | violation_note |
                             // forced_answer_note
    int step_index = -1;     // set for exploration_feedback

    json to_json() const;
};

struct RoundRecord {
    int round_index = 0;
    scenarios::EnvMessage incoming;
    std::vector<StepRecord> steps;
    std::string response;
    std::vector<std::string> model_turns;  // raw assistant replies, in order
    std::vector<LoggedMessage> messages;   // audit log slice for this round
    bool forced_answer = false;

    json to_json() const;
};

enum class Termination { task_complete, round_cap, error };

std::string to_string(Termination t);

struct Trace {
    std::string scenario;
    std::string episode_id;
    json config = json::object();
    std::vector<RoundRecord> rounds;
    json memory_dump = json::array();
    Termination termination = Termination::task_complete;
    std::string error_message;
    std::optional<json> court;  // state machine dump for CI/CR

    json to_json() const;
    static Trace from_json(const json& j);
};

void write_trace(const std::filesystem::path& path, const Trace& trace);
Trace read_trace(const std::filesystem::path& path);

struct ControllerConfig {
    int exploration_budget = 8;      // exploration calls per round
    int max_turns_per_round = 24;    // hard bound on model turns per round
    verifier::VerifierConfig verifier;
    std::size_t default_topk = 5;
    std::optional<int> round_cap_override;
};

struct Route {
    verifier::Recommendation recommendation = verifier::Recommendation::proceed;
    bool include_corrections = false;
    std::string directive;  // appended to the injected feedback when set
};

// proceed -> continue untouched; revise/re_explore -> the assessment's
// corrections ride along in the injected feedback with a directive, and the
// model decides what to do next. The controller never retries on its own.
Route route_recommendation(const verifier::Assessment& assessment);

// Shared immutable services plus per-episode mutable state.
class Episode {
public:
    Episode(const scenarios::Scenario& scenario, std::shared_ptr<const kb::KnowledgeBase> base,
            const tools::ToolRegistry* registry, const prompts::PromptLibrary* prompts,
            std::shared_ptr<model::ModelClient> main_client,
            std::shared_ptr<model::ModelClient> verifier_client, ControllerConfig config,
            std::string episode_id);

    // Runs one dialogue round: repeated model turns, atomic explore+verify
    // per exploration call, direct execution for memory calls, until the
    // model answers without a tool call or the exploration budget forces an
    // answer.
    RoundRecord run_round(const scenarios::EnvMessage& incoming);

    const memory::MemoryStore& memory() const { return memory_; }
    scenarios::CourtStateMachine* court() { return court_ ? court_.get() : nullptr; }
    const scenarios::Scenario& scenario() const { return scenario_; }
    int rounds_run() const { return round_index_; }
    json history_view() const;

    Trace finish(Termination termination, std::string error_message = "");

private:
    std::string system_prompt() const;
    void append_message(RoundRecord& round, const std::string& role, const std::string& content,
                        const std::string& meta, int step_index = -1);
    void scan_action_markers(const std::string& text);

    scenarios::Scenario scenario_;
    std::shared_ptr<const kb::KnowledgeBase> kb_;
    const tools::ToolRegistry* registry_;
    const prompts::PromptLibrary* prompts_;
    std::shared_ptr<model::ModelClient> main_client_;
    verifier::Verifier verifier_;
    ControllerConfig config_;

    memory::MemoryStore memory_;
    std::unique_ptr<scenarios::CourtStateMachine> court_;
    std::vector<model::ChatMessage> messages_;
    std::vector<RoundRecord> finished_rounds_;
    int round_index_ = 0;
    int next_step_index_ = 0;
    int assessment_seq_ = 0;
    std::string episode_id_;
};

// Alternates environment messages with run_round until the environment is
// done or the scenario's round cap is reached, then assembles the Trace.
Trace run_episode(const scenarios::Scenario& scenario, scenarios::Environment& environment,
                  std::shared_ptr<const kb::KnowledgeBase> base,
                  const tools::ToolRegistry& registry, const prompts::PromptLibrary& prompts,
                  std::shared_ptr<model::ModelClient> main_client,
                  std::shared_ptr<model::ModelClient> verifier_client,
                  const ControllerConfig& config, const std::string& episode_id);

// Re-runs an episode from the scripts recorded in an existing trace;
// byte-identical output proves replay determinism.
Trace replay_trace(const Trace& original, std::shared_ptr<const kb::KnowledgeBase> base,
                   const tools::ToolRegistry& registry, const prompts::PromptLibrary& prompts);

}  // namespace juris::controller
