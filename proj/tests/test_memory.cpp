#include <doctest.h>

#include "juris/errors.hpp"
#include "juris/memory.hpp"

using namespace juris;
using memory::Channel;
using memory::MemoryStore;
using memory::Writer;

TEST_CASE("store and fetch preserve insertion order and content") {
    MemoryStore store;
    auto id1 = store.store(Channel::case_context, "disputed issue: ownership",
                           Writer::main_agent, std::nullopt, 0);
    auto id2 = store.store(Channel::case_context, "evidence: purchase receipt",
                           Writer::main_agent, std::nullopt, 1);
    CHECK(id2 > id1);
    auto entries = store.fetch(Channel::case_context);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].content == "disputed issue: ownership");
    CHECK(entries[1].content == "evidence: purchase receipt");
}

TEST_CASE("fetch on a fresh channel is empty") {
    MemoryStore store;
    store.store(Channel::case_context, "x", Writer::main_agent, std::nullopt, 0);
    CHECK(store.fetch(Channel::legal_knowledge).empty());
}

TEST_CASE("main agent cannot write legal_knowledge") {
    MemoryStore store;
    CHECK_THROWS_AS(
        store.store(Channel::legal_knowledge, "x", Writer::main_agent, std::nullopt, 0), Error);
    try {
        store.store(Channel::legal_knowledge, "x", Writer::main_agent, "A1", 0);
        FAIL("expected PolicyViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::policy_violation);
    }
    CHECK(store.size() == 0);
}

TEST_CASE("legal_knowledge requires a verification_ref even for the verifier") {
    MemoryStore store;
    CHECK_THROWS_AS(
        store.store(Channel::legal_knowledge, "x", Writer::verifier, std::nullopt, 0), Error);
    auto id = store.store(Channel::legal_knowledge, "verified statute text", Writer::verifier,
                          "A17", 0);
    auto entries = store.fetch(Channel::legal_knowledge);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].entry_id == id);
    CHECK(entries[0].verification_ref == "A17");
}

TEST_CASE("the verifier may write case_context") {
    MemoryStore store;
    CHECK_NOTHROW(store.store(Channel::case_context, "court stage reached: debate",
                              Writer::verifier, std::nullopt, 2));
}

TEST_CASE("query fetch ranks the matching entry first") {
    MemoryStore store;
    store.store(Channel::legal_knowledge, "provision on robbery with violence",
                Writer::verifier, "A1", 0);
    store.store(Channel::legal_knowledge, "child support can be reclaimed as restitution",
                Writer::verifier, "A2", 0);
    store.store(Channel::legal_knowledge, "procedure stages of a civil trial",
                Writer::verifier, "A3", 0);
    auto hits = store.fetch(Channel::legal_knowledge, std::string("child support"), 3u);
    REQUIRE(!hits.empty());
    CHECK(hits[0].content.find("child support") != std::string::npos);
}

TEST_CASE("ids strictly increase and content round-trips byte-identically") {
    MemoryStore store;
    std::string content = "byte\tidentical\ncontent with \"quotes\" and 中文";
    std::uint64_t last = 0;
    for (int i = 0; i < 5; ++i) {
        auto id = store.store(Channel::case_context, content + std::to_string(i),
                              Writer::main_agent, std::nullopt, i);
        CHECK(id > last);
        last = id;
    }
    auto entries = store.fetch(Channel::case_context);
    REQUIRE(entries.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(entries[i].content == content + std::to_string(i));
    }
}

TEST_CASE("channel wire names map to the two channels") {
    CHECK(memory::channel_from_string("knowledge") == Channel::legal_knowledge);
    CHECK(memory::channel_from_string("legal_knowledge") == Channel::legal_knowledge);
    CHECK(memory::channel_from_string("context") == Channel::case_context);
    CHECK(memory::channel_from_string("case_context") == Channel::case_context);
    CHECK_THROWS_AS(memory::channel_from_string("scratch"), Error);
}
