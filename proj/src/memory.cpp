#include "juris/memory.hpp"

#include "juris/errors.hpp"
#include "juris/text.hpp"

namespace juris::memory {

std::string to_string(Channel c) {
    return c == Channel::legal_knowledge ? "legal_knowledge" : "case_context";
}

std::string to_string(Writer w) {
    return w == Writer::main_agent ? "main_agent" : "verifier";
}

Channel channel_from_string(const std::string& s) {
    auto v = text::normalize_law_name(s);
    if (v == "knowledge" || v == "legal_knowledge") return Channel::legal_knowledge;
    if (v == "context" || v == "case_context") return Channel::case_context;
    throw Error(ErrorCode::invalid_argument, "unknown memory channel: " + s);
}

json MemoryEntry::to_json() const {
    json j{{"entry_id", entry_id},
           {"channel", to_string(channel)},
           {"content", content},
           {"writer", to_string(writer)},
           {"round_index", round_index}};
    j["verification_ref"] = verification_ref ? json(*verification_ref) : json(nullptr);
    return j;
}

std::uint64_t MemoryStore::store(Channel channel, std::string content, Writer writer,
                                 std::optional<std::string> verification_ref, int round_index) {
    if (writer == Writer::main_agent && channel == Channel::legal_knowledge) {
        throw Error(ErrorCode::policy_violation,
                    "main agent may not write legal_knowledge memory");
    }
    if (channel == Channel::legal_knowledge && !verification_ref) {
        throw Error(ErrorCode::policy_violation,
                    "legal_knowledge entries require a verification_ref");
    }
    MemoryEntry entry;
    entry.entry_id = next_id_++;
    entry.channel = channel;
    entry.content = std::move(content);
    entry.writer = writer;
    entry.verification_ref = std::move(verification_ref);
    entry.round_index = round_index;
    entries_.push_back(std::move(entry));
    return entries_.back().entry_id;
}

std::vector<MemoryEntry> MemoryStore::fetch(Channel channel,
                                            const std::optional<std::string>& query,
                                            std::optional<std::size_t> topk) const {
    std::vector<MemoryEntry> out;
    if (!query || text::trim(*query).empty()) {
        for (auto& e : entries_) {
            if (e.channel == channel) out.push_back(e);
        }
    } else {
        std::vector<std::pair<std::string, std::string>> docs;
        for (auto& e : entries_) {
            if (e.channel == channel) {
                // Zero-pad so lexicographic id order equals numeric order.
                char key[24];
                std::snprintf(key, sizeof(key), "%016llu",
                              static_cast<unsigned long long>(e.entry_id));
                docs.emplace_back(key, e.content);
            }
        }
        for (auto& scored : text::rank_lexical(*query, docs, 0)) {
            std::uint64_t id = std::stoull(scored.id);
            for (auto& e : entries_) {
                if (e.entry_id == id) {
                    out.push_back(e);
                    break;
                }
            }
        }
    }
    if (topk && out.size() > *topk) out.resize(*topk);
    return out;
}

json MemoryStore::to_json() const {
    json arr = json::array();
    for (auto& e : entries_) arr.push_back(e.to_json());
    return arr;
}

}  // namespace juris::memory
