#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace juris::memory {

using json = nlohmann::json;

enum class Channel { legal_knowledge, case_context };
enum class Writer { main_agent, verifier };

std::string to_string(Channel c);
std::string to_string(Writer w);
// Wire values: "knowledge" -> legal_knowledge, "context" -> case_context
// (long forms accepted too).
Channel channel_from_string(const std::string& s);

struct MemoryEntry {
    std::uint64_t entry_id = 0;
    Channel channel = Channel::case_context;
    std::string content;
    Writer writer = Writer::main_agent;
    std::optional<std::string> verification_ref;
    int round_index = 0;

    json to_json() const;
};

// Append-only dual-channel store, scoped to one episode.
//
// Policy, enforced at store time:
//   - the main agent may only write case_context;
//   - legal_knowledge entries must carry a verification_ref.
class MemoryStore {
public:
    std::uint64_t store(Channel channel, std::string content, Writer writer,
                        std::optional<std::string> verification_ref, int round_index);

    // Without a query: all entries of the channel in insertion order. With
    // one: lexical ranking over entry content (same scoring as kb).
    std::vector<MemoryEntry> fetch(Channel channel,
                                   const std::optional<std::string>& query = std::nullopt,
                                   std::optional<std::size_t> topk = std::nullopt) const;

    const std::vector<MemoryEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    json to_json() const;

private:
    std::vector<MemoryEntry> entries_;
    std::uint64_t next_id_ = 1;
};

}  // namespace juris::memory
