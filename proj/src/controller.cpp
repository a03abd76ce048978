#include "juris/controller.hpp"

#include <fstream>
#include <sstream>

#include "juris/errors.hpp"
#include "juris/text.hpp"

namespace juris::controller {

std::string to_string(StepKind k) {
    switch (k) {
        case StepKind::exploration: return "exploration";
        case StepKind::memory: return "memory";
        case StepKind::checking: return "checking";
    }
    return "exploration";
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::task_complete: return "task_complete";
        case Termination::round_cap: return "round_cap";
        case Termination::error: return "error";
    }
    return "error";
}

json StepRecord::to_json() const {
    json j{{"step_index", step_index},
           {"kind", to_string(kind)},
           {"reasoning_text", reasoning_text},
           {"tool_call", {{"name", tool_call.name}, {"arguments", tool_call.arguments}}},
           {"result", result.to_json()}};
    j["assessment"] = assessment ? assessment->to_json() : json(nullptr);
    return j;
}

json LoggedMessage::to_json() const {
    json j{{"role", role}, {"content", content}, {"meta", meta}};
    if (step_index >= 0) j["step_index"] = step_index;
    return j;
}

json RoundRecord::to_json() const {
    json steps_json = json::array();
    for (auto& s : steps) steps_json.push_back(s.to_json());
    json turns = json::array();
    for (auto& t : model_turns) turns.push_back(t);
    json msgs = json::array();
    for (auto& m : messages) msgs.push_back(m.to_json());
    json incoming_json{{"role", incoming.role}, {"content", incoming.content}};
    if (incoming.expected_stage) incoming_json["expected_stage"] = *incoming.expected_stage;
    return json{{"round_index", round_index},
                {"incoming", incoming_json},
                {"steps", steps_json},
                {"response", response},
                {"model_turns", turns},
                {"messages", msgs},
                {"forced_answer", forced_answer}};
}

json Trace::to_json() const {
    json rounds_json = json::array();
    for (auto& r : rounds) rounds_json.push_back(r.to_json());
    json j{{"scenario", scenario},
           {"episode_id", episode_id},
           {"config", config},
           {"rounds", rounds_json},
           {"memory", memory_dump},
           {"termination", to_string(termination)}};
    if (!error_message.empty()) j["error"] = error_message;
    if (court) j["court"] = *court;
    return j;
}

namespace {

verifier::Assessment assessment_from_json(const json& j) {
    verifier::Assessment a;
    a.assessment_id = j.value("assessment_id", "");
    a.step_ref = j.value("step_ref", 0);
    a.accuracy = tools::check_status_from_string(j.value("accuracy", "inconclusive"));
    a.relevance = tools::check_status_from_string(j.value("relevance", "inconclusive"));
    a.compliance = tools::check_status_from_string(j.value("compliance", "inconclusive"));
    if (auto rec = verifier::recommendation_from_string(j.value("recommendation", "proceed"))) {
        a.recommendation = *rec;
    }
    if (j.contains("dimension_details")) {
        for (auto& d : j["dimension_details"]) {
            if (auto outcome = tools::CheckOutcome::from_json(d)) {
                a.dimension_details.push_back(*outcome);
            }
        }
    }
    if (j.contains("memory_writes")) {
        for (auto& id : j["memory_writes"]) a.memory_writes.push_back(id.get<std::uint64_t>());
    }
    if (j.contains("notes")) {
        for (auto& n : j["notes"]) a.notes.push_back(n.get<std::string>());
    }
    if (j.contains("transcript")) {
        for (auto& m : j["transcript"]) {
            a.transcript.push_back({m.value("role", ""), m.value("content", "")});
        }
    }
    return a;
}

StepRecord step_from_json(const json& j) {
    StepRecord s;
    s.step_index = j.value("step_index", 0);
    auto kind = j.value("kind", "exploration");
    s.kind = kind == "memory" ? StepKind::memory
                              : (kind == "checking" ? StepKind::checking : StepKind::exploration);
    s.reasoning_text = j.value("reasoning_text", "");
    if (j.contains("tool_call")) {
        s.tool_call.name = j["tool_call"].value("name", "");
        if (j["tool_call"].contains("arguments")) {
            s.tool_call.arguments = j["tool_call"]["arguments"];
        }
    }
    if (j.contains("result")) {
        s.result.payload = j["result"].value("payload", json());
        s.result.is_error = j["result"].value("is_error", false);
    }
    if (j.contains("assessment") && !j["assessment"].is_null()) {
        s.assessment = assessment_from_json(j["assessment"]);
    }
    return s;
}

}  // namespace

Trace Trace::from_json(const json& j) {
    Trace t;
    t.scenario = j.value("scenario", "");
    t.episode_id = j.value("episode_id", "");
    t.config = j.value("config", json::object());
    if (j.contains("rounds")) {
        for (auto& r : j["rounds"]) {
            RoundRecord round;
            round.round_index = r.value("round_index", 0);
            round.incoming.role = r["incoming"].value("role", "user");
            round.incoming.content = r["incoming"].value("content", "");
            if (r["incoming"].contains("expected_stage")) {
                round.incoming.expected_stage = r["incoming"]["expected_stage"].get<std::string>();
            }
            if (r.contains("steps")) {
                for (auto& s : r["steps"]) round.steps.push_back(step_from_json(s));
            }
            round.response = r.value("response", "");
            if (r.contains("model_turns")) {
                for (auto& m : r["model_turns"]) round.model_turns.push_back(m.get<std::string>());
            }
            if (r.contains("messages")) {
                for (auto& m : r["messages"]) {
                    round.messages.push_back({m.value("role", ""), m.value("content", ""),
                                              m.value("meta", ""), m.value("step_index", -1)});
                }
            }
            round.forced_answer = r.value("forced_answer", false);
            t.rounds.push_back(std::move(round));
        }
    }
    t.memory_dump = j.value("memory", json::array());
    auto term = j.value("termination", "error");
    t.termination = term == "task_complete"
                        ? Termination::task_complete
                        : (term == "round_cap" ? Termination::round_cap : Termination::error);
    t.error_message = j.value("error", "");
    if (j.contains("court")) t.court = j["court"];
    return t;
}

void write_trace(const std::filesystem::path& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write trace: " + path.string());
    out << trace.to_json().dump(2) << "\n";
}

Trace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot read trace: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw Error(ErrorCode::parse_error, "trace is not valid JSON: " + path.string());
    }
    return Trace::from_json(j);
}

Route route_recommendation(const verifier::Assessment& assessment) {
    Route route;
    route.recommendation = assessment.recommendation;
    switch (assessment.recommendation) {
        case verifier::Recommendation::proceed:
            break;
        case verifier::Recommendation::revise:
            route.include_corrections = true;
            route.directive = "revise the analysis using the corrections before continuing";
            break;
        case verifier::Recommendation::re_explore:
            route.include_corrections = true;
            route.directive = "reformulate the query and explore again";
            break;
    }
    return route;
}

Episode::Episode(const scenarios::Scenario& scenario,
                 std::shared_ptr<const kb::KnowledgeBase> base,
                 const tools::ToolRegistry* registry, const prompts::PromptLibrary* prompts,
                 std::shared_ptr<model::ModelClient> main_client,
                 std::shared_ptr<model::ModelClient> verifier_client, ControllerConfig config,
                 std::string episode_id)
    : scenario_(scenario),
      kb_(std::move(base)),
      registry_(registry),
      prompts_(prompts),
      main_client_(std::move(main_client)),
      verifier_(std::move(verifier_client), registry, prompts, config.verifier),
      config_(config),
      episode_id_(std::move(episode_id)) {
    if (scenario_.court_type) {
        court_ = std::make_unique<scenarios::CourtStateMachine>(
            kb_->get_procedure(*scenario_.court_type), scenarios::MachineMode::strict);
    }
    messages_.push_back({"system", system_prompt()});
}

std::string Episode::system_prompt() const {
    std::string instruction =
        prompts_ && prompts_->has("main_instruction")
            ? prompts_->get("main_instruction")
            : "Call tools with <tool_call>{\"name\": ..., \"arguments\": ...}</tool_call>; "
              "results arrive inside <tool_call_result>...</tool_call_result>.";
    return scenario_.agent_role + "\n\n" + instruction;
}

void Episode::append_message(RoundRecord& round, const std::string& role,
                             const std::string& content, const std::string& meta,
                             int step_index) {
    messages_.push_back({role, content});
    round.messages.push_back({role, content, meta, step_index});
}

void Episode::scan_action_markers(const std::string& turn_text) {
    if (!court_) return;
    std::size_t pos = 0;
    const std::string open = "[ACTION:";
    while ((pos = turn_text.find(open, pos)) != std::string::npos) {
        auto close = turn_text.find(']', pos);
        if (close == std::string::npos) break;
        auto action = text::trim(turn_text.substr(pos + open.size(), close - pos - open.size()));
        if (!action.empty()) {
            court_->try_record_marker(action);
            court_->auto_advance();
        }
        pos = close + 1;
    }
}

RoundRecord Episode::run_round(const scenarios::EnvMessage& incoming) {
    RoundRecord round;
    round.round_index = round_index_;
    round.incoming = incoming;

    std::string incoming_text = incoming.role == "user" || incoming.role.empty()
                                    ? incoming.content
                                    : "[" + incoming.role + "] " + incoming.content;
    append_message(round, "user", incoming_text, "incoming");

    std::string pending_reasoning;
    int exploration_used = 0;
    bool force_answer = false;

    for (int turn = 0;; ++turn) {
        if (turn >= config_.max_turns_per_round && !force_answer) {
            append_message(round, "user",
                           "[note] turn limit reached; answer now without further tools",
                           "forced_answer_note");
            force_answer = true;
        }

        auto reply = main_client_->complete(messages_);
        round.model_turns.push_back(reply);
        append_message(round, "assistant", reply, "assistant_turn");
        scan_action_markers(reply);

        if (force_answer) {
            round.response = reply;
            round.forced_answer = true;
            break;
        }

        auto segments = protocol::parse_turn(reply);
        const protocol::TurnSegment* call_seg = nullptr;
        const protocol::TurnSegment* broken_seg = nullptr;
        int extra_calls = 0;
        std::string pre_call_text;
        std::string post_call_text;
        for (auto& seg : segments) {
            switch (seg.kind) {
                case protocol::SegmentKind::text:
                    (call_seg ? post_call_text : pre_call_text) += seg.raw;
                    break;
                case protocol::SegmentKind::tool_call:
                    if (!call_seg) {
                        call_seg = &seg;
                    } else {
                        ++extra_calls;
                    }
                    break;
                case protocol::SegmentKind::malformed:
                case protocol::SegmentKind::incomplete:
                    if (!broken_seg) broken_seg = &seg;
                    break;
            }
        }

        if (!call_seg) {
            if (broken_seg) {
                pending_reasoning += pre_call_text;
                if (broken_seg->kind == protocol::SegmentKind::incomplete) {
                    append_message(round, "user",
                                   "[note] the tool call was truncated; re-issue it completely",
                                   "violation_note");
                } else {
                    append_message(round, "user",
                                   "[note] malformed tool call (" + broken_seg->error +
                                       "); re-issue it as "
                                       "<tool_call>{\"name\": ..., \"arguments\": ...}"
                                       "</tool_call>",
                                   "violation_note");
                }
                continue;
            }
            round.response = reply;
            break;
        }

        pending_reasoning += pre_call_text;
        const auto& call = *call_seg->call;
        std::string violation_suffix;
        if (extra_calls > 0) {
            violation_suffix = "\n[note] " + std::to_string(extra_calls) +
                               " additional tool call(s) ignored: one exploration per turn";
        }
        if (broken_seg) {
            violation_suffix += "\n[note] a malformed tool call in the same turn was ignored";
        }

        const auto* spec = registry_->find(call.name);
        if (!spec) {
            auto result = protocol::ToolResult::error("tool_not_found",
                                                      "no such tool: " + call.name);
            append_message(round, "user", protocol::render_result(result) + violation_suffix,
                           "tool_result");
            continue;
        }
        auto violations = protocol::validate_call(call, registry_->schema_map());
        if (!violations.empty()) {
            std::string joined;
            for (auto& v : violations) {
                if (!joined.empty()) joined += "; ";
                joined += v;
            }
            auto result = protocol::ToolResult::error("invalid_argument", joined);
            append_message(round, "user", protocol::render_result(result) + violation_suffix,
                           "tool_result");
            continue;
        }

        tools::ToolContext ctx;
        ctx.kb = kb_.get();
        ctx.memory = &memory_;
        ctx.model = main_client_.get();
        ctx.court = court_ ? court_.get() : nullptr;
        ctx.prompts = prompts_;
        ctx.caller = memory::Writer::main_agent;
        ctx.round_index = round_index_;
        ctx.default_topk = config_.default_topk;

        if (spec->category != tools::Category::exploration) {
            auto result = registry_->invoke(call.name, call.arguments, ctx);
            StepRecord step;
            step.step_index = next_step_index_++;
            step.kind = spec->category == tools::Category::memory ? StepKind::memory
                                                                  : StepKind::checking;
            step.tool_call = call;
            step.result = result;
            round.steps.push_back(std::move(step));
            append_message(round, "user", protocol::render_result(result) + violation_suffix,
                           "tool_result");
            pending_reasoning += post_call_text;
            continue;
        }

        if (exploration_used >= config_.exploration_budget) {
            append_message(round, "user",
                           "[note] exploration budget exhausted; answer now without further tools",
                           "forced_answer_note");
            force_answer = true;
            continue;
        }
        ++exploration_used;

        auto result = registry_->invoke(call.name, call.arguments, ctx);

        StepRecord step;
        step.step_index = next_step_index_++;
        step.kind = StepKind::exploration;
        step.reasoning_text = pending_reasoning;
        step.tool_call = call;
        step.result = result;
        pending_reasoning = post_call_text;

        // Atomic explore->verify: the result reaches the main chain only
        // together with its assessment, in one injected message.
        auto assessment_id = "A" + std::to_string(++assessment_seq_);
        verifier::StepView view{step.step_index, incoming.content, step.reasoning_text, call,
                                result};
        auto assessment = verifier_.verify(view, ctx, assessment_id);
        auto route = route_recommendation(assessment);

        json combined{{"result", result.to_json()},
                      {"assessment", assessment.feedback_json()}};
        if (!route.directive.empty()) combined["directive"] = route.directive;
        auto feedback = protocol::render_result(protocol::ToolResult::ok(combined));
        step.assessment = std::move(assessment);
        int idx = step.step_index;
        round.steps.push_back(std::move(step));
        append_message(round, "user", feedback + violation_suffix, "exploration_feedback", idx);
    }

    ++round_index_;
    finished_rounds_.push_back(round);
    return round;
}

json Episode::history_view() const {
    json rounds = json::array();
    for (auto& r : finished_rounds_) {
        rounds.push_back({{"round_index", r.round_index},
                          {"incoming", {{"role", r.incoming.role}, {"content", r.incoming.content}}},
                          {"response", r.response}});
    }
    return json{{"scenario", scenarios::to_string(scenario_.kind)}, {"rounds", rounds}};
}

Trace Episode::finish(Termination termination, std::string error_message) {
    Trace trace;
    trace.scenario = scenarios::to_string(scenario_.kind);
    trace.episode_id = episode_id_;
    trace.config = json{{"scenario", scenarios::to_string(scenario_.kind)},
                        {"round_cap", config_.round_cap_override.value_or(scenario_.round_cap)},
                        {"exploration_budget", config_.exploration_budget},
                        {"max_turns_per_round", config_.max_turns_per_round},
                        {"verifier_check_budget", config_.verifier.check_budget},
                        {"default_topk", config_.default_topk},
                        {"main_client", main_client_->describe()},
                        {"agent_role", scenario_.agent_role}};
    trace.rounds = finished_rounds_;
    trace.memory_dump = memory_.to_json();
    trace.termination = termination;
    trace.error_message = std::move(error_message);
    if (court_) trace.court = court_->to_json();
    return trace;
}

Trace run_episode(const scenarios::Scenario& scenario, scenarios::Environment& environment,
                  std::shared_ptr<const kb::KnowledgeBase> base,
                  const tools::ToolRegistry& registry, const prompts::PromptLibrary& prompts,
                  std::shared_ptr<model::ModelClient> main_client,
                  std::shared_ptr<model::ModelClient> verifier_client,
                  const ControllerConfig& config, const std::string& episode_id) {
    Episode episode(scenario, std::move(base), &registry, &prompts, std::move(main_client),
                    std::move(verifier_client), config, episode_id);
    int cap = config.round_cap_override.value_or(scenario.round_cap);
    for (int t = 0; t < cap; ++t) {
        std::optional<scenarios::EnvMessage> incoming;
        try {
            incoming = environment.next_message(episode.history_view());
        } catch (const std::exception& e) {
            return episode.finish(Termination::error,
                                  std::string("environment failure: ") + e.what());
        }
        if (!incoming) {
            return episode.finish(Termination::task_complete);
        }
        try {
            episode.run_round(*incoming);
        } catch (const std::exception& e) {
            return episode.finish(Termination::error,
                                  std::string("model client failure: ") + e.what());
        }
    }
    return episode.finish(Termination::round_cap);
}

Trace replay_trace(const Trace& original, std::shared_ptr<const kb::KnowledgeBase> base,
                   const tools::ToolRegistry& registry, const prompts::PromptLibrary& prompts) {
    std::vector<std::string> main_script;
    std::vector<std::string> verifier_script;
    std::vector<scenarios::EnvMessage> env_messages;
    for (auto& round : original.rounds) {
        env_messages.push_back(round.incoming);
        for (auto& turn : round.model_turns) main_script.push_back(turn);
        for (auto& step : round.steps) {
            if (!step.assessment) continue;
            for (auto& m : step.assessment->transcript) {
                if (m.role == "assistant") verifier_script.push_back(m.content);
            }
        }
    }
    auto scenario = scenarios::load_scenario(original.scenario);
    ControllerConfig config;
    if (original.config.contains("exploration_budget")) {
        config.exploration_budget = original.config["exploration_budget"].get<int>();
    }
    if (original.config.contains("max_turns_per_round")) {
        config.max_turns_per_round = original.config["max_turns_per_round"].get<int>();
    }
    if (original.config.contains("verifier_check_budget")) {
        config.verifier.check_budget = original.config["verifier_check_budget"].get<int>();
    }
    if (original.config.contains("round_cap")) {
        config.round_cap_override = original.config["round_cap"].get<int>();
    }
    scenarios::ScriptedEnvironment env(env_messages);
    auto main_client = std::make_shared<model::ScriptedModelClient>(main_script);
    auto verifier_client = std::make_shared<model::ScriptedModelClient>(verifier_script);
    return run_episode(scenario, env, std::move(base), registry, prompts, main_client,
                       verifier_client, config, original.episode_id);
}

}  // namespace juris::controller
