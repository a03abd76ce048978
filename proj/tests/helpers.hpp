#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "juris/kb.hpp"
#include "juris/prompts.hpp"

namespace testutil {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(JURIS_DATA_DIR); }
inline fs::path corpus_dir() { return data_dir() / "corpus"; }
inline fs::path prompts_dir() { return data_dir() / "prompts"; }
inline fs::path fixture_dir() { return fs::path(JURIS_FIXTURE_DIR); }

// Shared ingest of the bundled sample corpus.
inline std::shared_ptr<juris::kb::KnowledgeBase> sample_kb() {
    static auto kb = juris::kb::KnowledgeBase::ingest(corpus_dir());
    return kb;
}

inline const juris::prompts::PromptLibrary& sample_prompts() {
    static juris::prompts::PromptLibrary lib(prompts_dir());
    return lib;
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        auto base = fs::temp_directory_path() / "juris_test";
        fs::create_directories(base);
        path_ = base / (std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << content;
}

// Minimal corpus scaffolding: callers override individual files.
struct CorpusBuilder {
    std::string laws;
    std::string charges = "\n";
    std::string cases = "\n";
    std::string map = "\n";
    std::string complaint =
        R"({"template_type": "complaint", "section": "claims", "requirement": "mandatory", "guidance": "g"})"
        "\n";
    std::string defence =
        R"({"template_type": "defence", "section": "defence arguments", "requirement": "mandatory", "guidance": "g"})"
        "\n";
    std::string civil =
        R"({"court_type": "civil", "stage": "s1", "mandatory_actions": [{"id": "a1", "description": "d"}]})"
        "\n";
    std::string criminal =
        R"({"court_type": "criminal", "stage": "s1", "mandatory_actions": [{"id": "b1", "description": "d"}]})"
        "\n";

    void write(const fs::path& dir) const {
        write_file(dir / "laws.jsonl", laws);
        write_file(dir / "charges.jsonl", charges);
        write_file(dir / "cases.jsonl", cases);
        write_file(dir / "charge_law_map.jsonl", map);
        write_file(dir / "templates" / "complaint.jsonl", complaint);
        write_file(dir / "templates" / "defence.jsonl", defence);
        write_file(dir / "procedures" / "civil.jsonl", civil);
        write_file(dir / "procedures" / "criminal.jsonl", criminal);
    }
};

inline std::string law_line(const std::string& id, const std::string& law, int number,
                            const std::string& body, const std::string& category = "civil") {
    nlohmann::json j{{"article_id", id},
                     {"law_name", law},
                     {"article_number", number},
                     {"body", body},
                     {"category", category}};
    return j.dump() + "\n";
}

}  // namespace testutil
