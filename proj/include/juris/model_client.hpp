#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace juris::model {

using json = nlohmann::json;

struct ChatMessage {
    std::string role;  // system | user | assistant | tool
    std::string content;

    json to_json() const { return json{{"role", role}, {"content", content}}; }
};

class ModelClient {
public:
    virtual ~ModelClient() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
    virtual std::string describe() const = 0;
};

// Deterministic replay client: returns scripted responses in order. When
// the script runs out it returns the fallback forever, or throws
// model_error if no fallback was given.
class ScriptedModelClient : public ModelClient {
public:
    explicit ScriptedModelClient(std::vector<std::string> responses,
                                 std::string fallback = "");

    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string describe() const override { return "scripted"; }

    std::size_t consumed() const { return next_; }
    void reset() { next_ = 0; }

private:
    std::vector<std::string> responses_;
    std::string fallback_;
    std::size_t next_ = 0;
};

// Fails every call; used to prove the grounded checking tools never depend
// on a model.
class FailingModelClient : public ModelClient {
public:
    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string describe() const override { return "failing"; }
};

struct EndpointConfig {
    std::string base_url;          // e.g. http://localhost:8000
    std::string model;             // model name
    std::string api_key_env = "JURIS_API_KEY";
    double temperature = 0.0;
};

// OpenAI-style chat-completions client over HTTP. The auth token is read
// from the environment variable named in the config.
class HttpModelClient : public ModelClient {
public:
    explicit HttpModelClient(EndpointConfig config);
    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string describe() const override { return "endpoint:" + config_.model; }

private:
    EndpointConfig config_;
};

// Loads a replay script file holding response lists per role:
//   {"main": [...], "verifier": [...], "environment": [...], "judge": [...],
//    "fallbacks": {"main": "..."}}
// Missing roles yield empty scripts. Returned clients are independent.
struct ScriptSet {
    std::shared_ptr<ScriptedModelClient> main;
    std::shared_ptr<ScriptedModelClient> verifier;
    std::shared_ptr<ScriptedModelClient> environment;
    std::shared_ptr<ScriptedModelClient> judge;
};

ScriptSet load_script_file(const std::string& path);
ScriptSet script_set_from_json(const json& doc);

}  // namespace juris::model
