#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "juris/kb.hpp"
#include "juris/model_client.hpp"

namespace juris::scenarios {

using json = nlohmann::json;

enum class Kind { KQ, LC, CD, DD, CI, CR };
enum class Level { I, II, III };

std::string to_string(Kind k);
std::string to_string(Level l);
Kind kind_from_string(const std::string& s);

struct Scenario {
    Kind kind = Kind::KQ;
    Level level = Level::I;
    std::string agent_role;  // role paragraph prepended to the system prompt
    int round_cap = 0;
    std::string termination_rule;  // "environment_done" for all six kinds
    std::optional<kb::CourtType> court_type;  // set for CI/CR
};

// Round caps: KQ 15, LC 10, CD 30, DD 30, CI 60, CR 50.
Scenario load_scenario(Kind kind);
Scenario load_scenario(const std::string& kind);

struct EnvMessage {
    std::string role;
    std::string content;
    std::optional<std::string> expected_stage;  // fixture annotation
};

// Produces the counterparty side of the dialogue. next_message returns
// nullopt once the task is over; that signal is terminal.
class Environment {
public:
    virtual ~Environment() = default;
    virtual std::optional<EnvMessage> next_message(const json& history_view) = 0;
    virtual std::vector<std::string> counterparty_roles() const = 0;
};

// Replays a fixed transcript; done when exhausted. Transcript files are
// JSONL records {"role": ..., "message": ..., "expected_stage"?: ...}.
class ScriptedEnvironment : public Environment {
public:
    explicit ScriptedEnvironment(std::vector<EnvMessage> messages);
    static std::unique_ptr<ScriptedEnvironment> from_file(const std::string& path);

    std::optional<EnvMessage> next_message(const json& history_view) override;
    std::vector<std::string> counterparty_roles() const override;

private:
    std::vector<EnvMessage> messages_;
    std::size_t next_ = 0;
};

// Drives the counterparty with a model. The environment signals completion
// by emitting a line containing [DONE].
class ModelEnvironment : public Environment {
public:
    ModelEnvironment(std::shared_ptr<model::ModelClient> client, std::string system_prompt,
                     std::string role);

    std::optional<EnvMessage> next_message(const json& history_view) override;
    std::vector<std::string> counterparty_roles() const override { return {role_}; }

private:
    std::shared_ptr<model::ModelClient> client_;
    std::string system_prompt_;
    std::string role_;
    bool done_ = false;
};

enum class MachineMode { strict, lenient };

struct MachineEvent {
    std::string kind;  // action_completed | stage_advanced | out_of_order_rejected |
                       // invalid_action_rejected | advance_rejected
    std::string stage;
    std::string action;
    std::string detail;

    json to_json() const;
    static MachineEvent from_json(const json& j);
};

struct StageCompletion {
    std::string stage_name;
    std::size_t mandatory = 0;
    std::size_t completed = 0;
    bool complete = false;
};

struct CompletionSnapshot {
    std::vector<StageCompletion> stages;
    std::size_t total_mandatory = 0;
    std::size_t total_completed = 0;

    json to_json() const;
};

// Tracks progress through a court procedure. In strict mode stages advance
// only forward, an action may complete only while its stage is current, and
// advancing requires every mandatory action of the current stage. Lenient
// mode records actions into their own stages regardless of order, for
// scoring traces that ignore procedure.
class CourtStateMachine {
public:
    explicit CourtStateMachine(kb::ProcedureSpec spec, MachineMode mode = MachineMode::strict);

    // Throws out_of_order / invalid_action in strict mode. Idempotent for
    // an already-completed action.
    void record_action(const std::string& stage_name, const std::string& action_id);
    // Resolves the action's stage from the spec (action ids are unique
    // across stages in the bundled specs). Rejections are logged instead of
    // thrown; returns whether the action was recorded.
    bool try_record_marker(const std::string& action_id);

    // Throws incomplete_stage (strict, actions missing) or terminal_state.
    void advance_stage();
    // Advances while the current stage is complete; used by the controller
    // after marker batches.
    void auto_advance();

    bool terminal() const;
    std::size_t current_stage() const { return current_stage_; }
    const kb::ProcedureSpec& spec() const { return spec_; }
    MachineMode mode() const { return mode_; }

    bool stage_complete(std::size_t index) const;
    std::vector<std::string> missing_actions(std::size_t index) const;
    bool action_completed(const std::string& action_id) const;

    CompletionSnapshot completion_snapshot() const;
    const std::vector<MachineEvent>& event_log() const { return events_; }
    bool has_rejections() const;

    // Rebuilds a machine from an event log (fold over accepted events;
    // rejected events are re-appended to the log verbatim).
    static CourtStateMachine replay(const kb::ProcedureSpec& spec, MachineMode mode,
                                    const std::vector<MachineEvent>& events);

    json to_json() const;

private:
    std::optional<std::size_t> stage_of_action(const std::string& action_id) const;
    std::optional<std::size_t> stage_index(const std::string& stage_name) const;

    kb::ProcedureSpec spec_;
    MachineMode mode_;
    std::size_t current_stage_ = 0;
    std::vector<std::set<std::string>> completed_;
    std::vector<MachineEvent> events_;
};

}  // namespace juris::scenarios
