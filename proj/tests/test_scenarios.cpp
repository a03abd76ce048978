#include <doctest.h>

#include "helpers.hpp"
#include "juris/errors.hpp"
#include "juris/scenarios.hpp"

using namespace juris;
using scenarios::CourtStateMachine;
using scenarios::MachineMode;

TEST_CASE("scenario caps and levels match the fixed table") {
    struct Row {
        scenarios::Kind kind;
        int cap;
        scenarios::Level level;
    };
    for (auto& row : {Row{scenarios::Kind::KQ, 15, scenarios::Level::I},
                      Row{scenarios::Kind::LC, 10, scenarios::Level::I},
                      Row{scenarios::Kind::CD, 30, scenarios::Level::II},
                      Row{scenarios::Kind::DD, 30, scenarios::Level::II},
                      Row{scenarios::Kind::CI, 60, scenarios::Level::III},
                      Row{scenarios::Kind::CR, 50, scenarios::Level::III}}) {
        auto s = scenarios::load_scenario(row.kind);
        CHECK(s.round_cap == row.cap);
        CHECK(s.level == row.level);
    }
    CHECK(scenarios::load_scenario("CI").round_cap == 60);
    CHECK(scenarios::load_scenario("CR").round_cap == 50);
    CHECK(scenarios::load_scenario("kq").round_cap == 15);
    CHECK_THROWS_AS(scenarios::load_scenario("XX"), Error);
}

TEST_CASE("scenario roles escalate with level") {
    CHECK(scenarios::load_scenario("KQ").agent_role.find("trainee") != std::string::npos);
    CHECK(scenarios::load_scenario("CD").agent_role.find("lawyer") != std::string::npos);
    CHECK(scenarios::load_scenario("CI").agent_role.find("judge") != std::string::npos);
    CHECK(scenarios::load_scenario("CI").court_type == kb::CourtType::civil);
    CHECK(scenarios::load_scenario("CR").court_type == kb::CourtType::criminal);
    CHECK(!scenarios::load_scenario("KQ").court_type);
}

namespace {

CourtStateMachine civil_machine(MachineMode mode = MachineMode::strict) {
    return CourtStateMachine(testutil::sample_kb()->get_procedure(kb::CourtType::civil), mode);
}

CourtStateMachine criminal_machine(MachineMode mode = MachineMode::strict) {
    return CourtStateMachine(testutil::sample_kb()->get_procedure(kb::CourtType::criminal), mode);
}

void complete_stage(CourtStateMachine& m, std::size_t stage_index) {
    const auto& stage = m.spec().stages.at(stage_index);
    for (auto& a : stage.mandatory_actions) m.record_action(stage.name, a.id);
}

}  // namespace

TEST_CASE("recording a current-stage action grows the completed set") {
    auto m = civil_machine();
    m.record_action("preparation", "confirm_party_identities");
    auto snap = m.completion_snapshot();
    CHECK(snap.stages[0].completed == 1);
    CHECK(snap.total_completed == 1);
}

TEST_CASE("strict mode rejects actions of another stage") {
    auto m = civil_machine();
    CHECK_THROWS_AS(m.record_action("debate", "court_debate"), Error);
    try {
        m.record_action("debate", "court_debate");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::out_of_order);
    }
    // Re-recording a completed action of a passed stage stays a no-op
    // (strict advancement means passed stages are always fully complete).
    complete_stage(m, 0);
    m.advance_stage();
    auto events = m.event_log().size();
    CHECK_NOTHROW(m.record_action("preparation", "confirm_party_identities"));
    CHECK(m.event_log().size() == events);
}

TEST_CASE("unknown actions and mismatched stages are invalid") {
    auto m = civil_machine();
    CHECK_THROWS_AS(m.record_action("preparation", "no_such_action"), Error);
    CHECK_THROWS_AS(m.record_action("no_such_stage", "confirm_party_identities"), Error);
    // cross_examination belongs to investigation, not preparation
    CHECK_THROWS_AS(m.record_action("preparation", "cross_examination"), Error);
}

TEST_CASE("repeating a completed action changes nothing") {
    auto m = civil_machine();
    m.record_action("preparation", "confirm_party_identities");
    auto events_before = m.event_log().size();
    m.record_action("preparation", "confirm_party_identities");
    CHECK(m.event_log().size() == events_before);
    CHECK(m.completion_snapshot().stages[0].completed == 1);
}

TEST_CASE("advance requires all mandatory actions in strict mode") {
    auto m = civil_machine();
    m.record_action("preparation", "confirm_party_identities");
    m.record_action("preparation", "announce_court_discipline");
    try {
        m.advance_stage();
        FAIL("expected IncompleteStage");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::incomplete_stage);
        CHECK(std::string(e.what()).find("inform_rights_obligations") != std::string::npos);
    }
    m.record_action("preparation", "inform_rights_obligations");
    m.advance_stage();
    CHECK(m.current_stage() == 1);
}

TEST_CASE("advancing past the last stage is terminal") {
    auto m = criminal_machine();
    for (std::size_t i = 0; i < m.spec().stages.size(); ++i) {
        complete_stage(m, i);
        if (i + 1 < m.spec().stages.size()) m.advance_stage();
    }
    CHECK(m.terminal());
    CHECK_THROWS_AS(m.advance_stage(), Error);
    try {
        auto m2 = criminal_machine();
        complete_stage(m2, 0);
        m2.advance_stage();
        complete_stage(m2, 1);
        m2.advance_stage();
        complete_stage(m2, 2);
        m2.advance_stage();
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::terminal_state);
    }
}

TEST_CASE("fresh machine snapshot is all zeros") {
    auto m = civil_machine();
    auto snap = m.completion_snapshot();
    CHECK(snap.stages.size() == 5);
    CHECK(snap.total_completed == 0);
    for (auto& s : snap.stages) {
        CHECK(s.completed == 0);
        CHECK(!s.complete);
    }
}

TEST_CASE("civil machine with three stages driven reports three complete") {
    auto m = civil_machine();
    for (std::size_t i = 0; i < 3; ++i) {
        complete_stage(m, i);
        m.advance_stage();
    }
    auto snap = m.completion_snapshot();
    std::size_t complete = 0;
    for (auto& s : snap.stages) complete += s.complete ? 1 : 0;
    CHECK(complete == 3);
    CHECK(snap.total_completed == 3 + 4 + 2);
}

TEST_CASE("criminal machine fully driven reports 3/3 complete") {
    auto m = criminal_machine();
    complete_stage(m, 0);
    m.advance_stage();
    complete_stage(m, 1);
    m.advance_stage();
    complete_stage(m, 2);
    auto snap = m.completion_snapshot();
    for (auto& s : snap.stages) CHECK(s.complete);
    CHECK(m.terminal());
}

TEST_CASE("event-log replay reconstructs the machine exactly") {
    auto m = civil_machine();
    complete_stage(m, 0);
    m.advance_stage();
    m.record_action("investigation", "plaintiff_statement");
    m.try_record_marker("pronounce_judgment");  // out of order, logged
    auto rebuilt = CourtStateMachine::replay(m.spec(), m.mode(), m.event_log());
    CHECK(rebuilt.to_json() == m.to_json());
}

TEST_CASE("try_record_marker logs rejections instead of throwing") {
    auto m = civil_machine();
    CHECK(!m.try_record_marker("pronounce_judgment"));
    CHECK(!m.try_record_marker("definitely_not_an_action"));
    CHECK(m.try_record_marker("confirm_party_identities"));
    CHECK(m.has_rejections());
    int rejected = 0;
    for (auto& e : m.event_log()) {
        if (e.kind == "out_of_order_rejected" || e.kind == "invalid_action_rejected") ++rejected;
    }
    CHECK(rejected == 2);
}

TEST_CASE("lenient mode records actions regardless of the current stage") {
    auto m = civil_machine(MachineMode::lenient);
    CHECK(m.try_record_marker("pronounce_judgment"));
    CHECK(m.try_record_marker("court_debate"));
    auto snap = m.completion_snapshot();
    CHECK(snap.stages[4].completed == 1);
    CHECK(snap.stages[2].completed == 1);
    CHECK(!m.has_rejections());
}

TEST_CASE("stage aliases resolve (mitigation/mediation)") {
    auto m = civil_machine();
    complete_stage(m, 0);
    m.advance_stage();
    complete_stage(m, 1);
    m.advance_stage();
    complete_stage(m, 2);
    m.advance_stage();
    CHECK_NOTHROW(m.record_action("mediation", "mediation_inquiry"));
    CHECK(m.stage_complete(3));
}

TEST_CASE("scripted environment replays its transcript then signals done") {
    scenarios::ScriptedEnvironment env({{"user", "q1", std::nullopt},
                                        {"user", "q2", std::nullopt}});
    auto m1 = env.next_message(nlohmann::json::object());
    REQUIRE(m1);
    CHECK(m1->content == "q1");
    auto m2 = env.next_message(nlohmann::json::object());
    REQUIRE(m2);
    CHECK(!env.next_message(nlohmann::json::object()));
    CHECK(!env.next_message(nlohmann::json::object()));
}
