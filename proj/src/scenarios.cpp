#include "juris/scenarios.hpp"

#include <algorithm>
#include <fstream>

#include "juris/errors.hpp"
#include "juris/text.hpp"

namespace juris::scenarios {

std::string to_string(Kind k) {
    switch (k) {
        case Kind::KQ: return "KQ";
        case Kind::LC: return "LC";
        case Kind::CD: return "CD";
        case Kind::DD: return "DD";
        case Kind::CI: return "CI";
        case Kind::CR: return "CR";
    }
    return "KQ";
}

std::string to_string(Level l) {
    switch (l) {
        case Level::I: return "I";
        case Level::II: return "II";
        case Level::III: return "III";
    }
    return "I";
}

Kind kind_from_string(const std::string& s) {
    auto v = text::trim(s);
    std::transform(v.begin(), v.end(), v.begin(), ::toupper);
    if (v == "KQ") return Kind::KQ;
    if (v == "LC") return Kind::LC;
    if (v == "CD") return Kind::CD;
    if (v == "DD") return Kind::DD;
    if (v == "CI") return Kind::CI;
    if (v == "CR") return Kind::CR;
    throw Error(ErrorCode::invalid_argument, "unknown scenario kind: " + s);
}

Scenario load_scenario(Kind kind) {
    Scenario s;
    s.kind = kind;
    s.termination_rule = "environment_done";
    switch (kind) {
        case Kind::KQ:
            s.level = Level::I;
            s.round_cap = 15;
            s.agent_role =
                "You act as a legal trainee answering progressive questions from the "
                "general public about legal knowledge and specific cases.";
            break;
        case Kind::LC:
            s.level = Level::I;
            s.round_cap = 10;
            s.agent_role =
                "You act as a legal trainee providing consultation on a specific case "
                "brought by a member of the public.";
            break;
        case Kind::CD:
            s.level = Level::II;
            s.round_cap = 30;
            s.agent_role =
                "You act as a lawyer interviewing a litigant across multiple turns to "
                "draft a formal complaint document with every required section.";
            break;
        case Kind::DD:
            s.level = Level::II;
            s.round_cap = 30;
            s.agent_role =
                "You act as a lawyer gathering information across multiple turns to "
                "draft a formal defence document with every required section.";
            break;
        case Kind::CI:
            s.level = Level::III;
            s.round_cap = 60;
            s.agent_role =
                "You act as the presiding judge of a civil court, conducting every "
                "stage of the trial in order before delivering a judgment.";
            s.court_type = kb::CourtType::civil;
            break;
        case Kind::CR:
            s.level = Level::III;
            s.round_cap = 50;
            s.agent_role =
                "You act as the presiding judge of a criminal court, conducting every "
                "stage of the trial in order before delivering a judgment.";
            s.court_type = kb::CourtType::criminal;
            break;
    }
    return s;
}

Scenario load_scenario(const std::string& kind) {
    return load_scenario(kind_from_string(kind));
}

ScriptedEnvironment::ScriptedEnvironment(std::vector<EnvMessage> messages)
    : messages_(std::move(messages)) {}

std::unique_ptr<ScriptedEnvironment> ScriptedEnvironment::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open transcript: " + path);
    std::vector<EnvMessage> messages;
    std::string line;
    while (std::getline(in, line)) {
        auto trimmed = text::trim(line);
        if (trimmed.empty()) continue;
        json rec = json::parse(trimmed, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw Error(ErrorCode::parse_error, "malformed transcript line: " + trimmed);
        }
        EnvMessage m;
        m.role = rec.value("role", "user");
        m.content = rec.contains("message") ? rec["message"].get<std::string>()
                                            : rec.value("content", "");
        if (rec.contains("expected_stage")) {
            m.expected_stage = rec["expected_stage"].get<std::string>();
        }
        messages.push_back(std::move(m));
    }
    return std::make_unique<ScriptedEnvironment>(std::move(messages));
}

std::optional<EnvMessage> ScriptedEnvironment::next_message(const json&) {
    if (next_ >= messages_.size()) return std::nullopt;
    return messages_[next_++];
}

std::vector<std::string> ScriptedEnvironment::counterparty_roles() const {
    std::set<std::string> roles;
    for (auto& m : messages_) roles.insert(m.role);
    return {roles.begin(), roles.end()};
}

ModelEnvironment::ModelEnvironment(std::shared_ptr<model::ModelClient> client,
                                   std::string system_prompt, std::string role)
    : client_(std::move(client)), system_prompt_(std::move(system_prompt)),
      role_(std::move(role)) {}

std::optional<EnvMessage> ModelEnvironment::next_message(const json& history_view) {
    if (done_) return std::nullopt;
    std::vector<model::ChatMessage> messages;
    messages.push_back({"system", system_prompt_});
    messages.push_back({"user", history_view.dump()});
    auto reply = client_->complete(messages);
    if (reply.find("[DONE]") != std::string::npos) {
        done_ = true;
        auto cleaned = text::trim(reply.substr(0, reply.find("[DONE]")));
        if (cleaned.empty()) return std::nullopt;
        return EnvMessage{role_, cleaned, std::nullopt};
    }
    return EnvMessage{role_, reply, std::nullopt};
}

json MachineEvent::to_json() const {
    return json{{"kind", kind}, {"stage", stage}, {"action", action}, {"detail", detail}};
}

MachineEvent MachineEvent::from_json(const json& j) {
    return MachineEvent{j.value("kind", ""), j.value("stage", ""), j.value("action", ""),
                        j.value("detail", "")};
}

json CompletionSnapshot::to_json() const {
    json stages_json = json::array();
    for (auto& s : stages) {
        stages_json.push_back({{"stage", s.stage_name},
                               {"mandatory", s.mandatory},
                               {"completed", s.completed},
                               {"complete", s.complete}});
    }
    return json{{"stages", stages_json},
                {"total_mandatory", total_mandatory},
                {"total_completed", total_completed}};
}

CourtStateMachine::CourtStateMachine(kb::ProcedureSpec spec, MachineMode mode)
    : spec_(std::move(spec)), mode_(mode), completed_(spec_.stages.size()) {
    if (spec_.stages.empty()) {
        throw Error(ErrorCode::invalid_argument, "procedure spec has no stages");
    }
}

std::optional<std::size_t> CourtStateMachine::stage_index(const std::string& stage_name) const {
    auto norm = text::normalize_law_name(stage_name);
    for (std::size_t i = 0; i < spec_.stages.size(); ++i) {
        if (text::normalize_law_name(spec_.stages[i].name) == norm) return i;
        for (auto& alias : spec_.stages[i].aliases) {
            if (text::normalize_law_name(alias) == norm) return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> CourtStateMachine::stage_of_action(const std::string& action_id) const {
    for (std::size_t i = 0; i < spec_.stages.size(); ++i) {
        for (auto& a : spec_.stages[i].mandatory_actions) {
            if (a.id == action_id) return i;
        }
    }
    return std::nullopt;
}

void CourtStateMachine::record_action(const std::string& stage_name,
                                      const std::string& action_id) {
    auto stage = stage_index(stage_name);
    if (!stage) {
        events_.push_back({"invalid_action_rejected", stage_name, action_id, "unknown stage"});
        throw Error(ErrorCode::invalid_action, "unknown stage: " + stage_name);
    }
    auto owning = stage_of_action(action_id);
    if (!owning || *owning != *stage) {
        events_.push_back({"invalid_action_rejected", stage_name, action_id,
                           "action does not belong to stage"});
        throw Error(ErrorCode::invalid_action,
                    "action '" + action_id + "' does not belong to stage '" + stage_name + "'");
    }
    if (completed_[*stage].count(action_id)) return;  // idempotent
    if (mode_ == MachineMode::strict && *stage != current_stage_) {
        events_.push_back({"out_of_order_rejected", stage_name, action_id,
                           *stage > current_stage_ ? "stage not yet reached" : "stage already passed"});
        throw Error(ErrorCode::out_of_order,
                    "action '" + action_id + "' belongs to stage '" + stage_name +
                        "' but the current stage is '" + spec_.stages[current_stage_].name + "'");
    }
    completed_[*stage].insert(action_id);
    events_.push_back({"action_completed", spec_.stages[*stage].name, action_id, ""});
}

bool CourtStateMachine::try_record_marker(const std::string& action_id) {
    auto owning = stage_of_action(action_id);
    if (!owning) {
        events_.push_back({"invalid_action_rejected", "", action_id, "unknown action"});
        return false;
    }
    if (completed_[*owning].count(action_id)) return true;
    if (mode_ == MachineMode::strict && *owning != current_stage_) {
        events_.push_back({"out_of_order_rejected", spec_.stages[*owning].name, action_id,
                           *owning > current_stage_ ? "stage not yet reached" : "stage already passed"});
        return false;
    }
    completed_[*owning].insert(action_id);
    events_.push_back({"action_completed", spec_.stages[*owning].name, action_id, ""});
    return true;
}

bool CourtStateMachine::stage_complete(std::size_t index) const {
    if (index >= spec_.stages.size()) return false;
    return completed_[index].size() == spec_.stages[index].mandatory_actions.size();
}

std::vector<std::string> CourtStateMachine::missing_actions(std::size_t index) const {
    std::vector<std::string> missing;
    if (index >= spec_.stages.size()) return missing;
    for (auto& a : spec_.stages[index].mandatory_actions) {
        if (!completed_[index].count(a.id)) missing.push_back(a.id);
    }
    return missing;
}

bool CourtStateMachine::action_completed(const std::string& action_id) const {
    auto owning = stage_of_action(action_id);
    if (!owning) return false;
    return completed_[*owning].count(action_id) > 0;
}

bool CourtStateMachine::terminal() const {
    return current_stage_ + 1 >= spec_.stages.size() && stage_complete(current_stage_);
}

void CourtStateMachine::advance_stage() {
    if (current_stage_ + 1 >= spec_.stages.size()) {
        events_.push_back({"advance_rejected", spec_.stages[current_stage_].name, "",
                           "already at the final stage"});
        throw Error(ErrorCode::terminal_state, "already at the final stage");
    }
    if (mode_ == MachineMode::strict && !stage_complete(current_stage_)) {
        auto missing = missing_actions(current_stage_);
        std::string list;
        for (auto& m : missing) {
            if (!list.empty()) list += ", ";
            list += m;
        }
        events_.push_back({"advance_rejected", spec_.stages[current_stage_].name, "",
                           "missing: " + list});
        throw Error(ErrorCode::incomplete_stage,
                    "stage '" + spec_.stages[current_stage_].name +
                        "' has incomplete mandatory actions: " + list);
    }
    ++current_stage_;
    events_.push_back({"stage_advanced", spec_.stages[current_stage_].name, "", ""});
}

void CourtStateMachine::auto_advance() {
    while (current_stage_ + 1 < spec_.stages.size() && stage_complete(current_stage_)) {
        advance_stage();
    }
}

CompletionSnapshot CourtStateMachine::completion_snapshot() const {
    CompletionSnapshot snap;
    for (std::size_t i = 0; i < spec_.stages.size(); ++i) {
        StageCompletion sc;
        sc.stage_name = spec_.stages[i].name;
        sc.mandatory = spec_.stages[i].mandatory_actions.size();
        sc.completed = completed_[i].size();
        sc.complete = sc.completed == sc.mandatory;
        snap.total_mandatory += sc.mandatory;
        snap.total_completed += sc.completed;
        snap.stages.push_back(std::move(sc));
    }
    return snap;
}

bool CourtStateMachine::has_rejections() const {
    for (auto& e : events_) {
        if (e.kind == "out_of_order_rejected" || e.kind == "invalid_action_rejected" ||
            e.kind == "advance_rejected") {
            return true;
        }
    }
    return false;
}

CourtStateMachine CourtStateMachine::replay(const kb::ProcedureSpec& spec, MachineMode mode,
                                            const std::vector<MachineEvent>& events) {
    CourtStateMachine machine(spec, mode);
    for (auto& e : events) {
        if (e.kind == "action_completed") {
            auto stage = machine.stage_index(e.stage);
            if (!stage) {
                throw Error(ErrorCode::integrity_error, "replay: unknown stage " + e.stage);
            }
            machine.completed_[*stage].insert(e.action);
            machine.events_.push_back(e);
        } else if (e.kind == "stage_advanced") {
            if (machine.current_stage_ + 1 >= machine.spec_.stages.size()) {
                throw Error(ErrorCode::integrity_error, "replay: advance past final stage");
            }
            ++machine.current_stage_;
            machine.events_.push_back(e);
        } else {
            machine.events_.push_back(e);  // rejected attempts: log only
        }
    }
    return machine;
}

json CourtStateMachine::to_json() const {
    json events = json::array();
    for (auto& e : events_) events.push_back(e.to_json());
    return json{{"court_type", kb::to_string(spec_.court_type)},
                {"mode", mode_ == MachineMode::strict ? "strict" : "lenient"},
                {"current_stage", current_stage_},
                {"current_stage_name", spec_.stages[current_stage_].name},
                {"snapshot", completion_snapshot().to_json()},
                {"events", events}};
}

}  // namespace juris::scenarios
