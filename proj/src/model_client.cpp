#include "juris/model_client.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "juris/errors.hpp"

namespace juris::model {

ScriptedModelClient::ScriptedModelClient(std::vector<std::string> responses, std::string fallback)
    : responses_(std::move(responses)), fallback_(std::move(fallback)) {}

std::string ScriptedModelClient::complete(const std::vector<ChatMessage>&) {
    if (next_ < responses_.size()) return responses_[next_++];
    if (!fallback_.empty()) return fallback_;
    throw Error(ErrorCode::model_error, "scripted client exhausted after " +
                                            std::to_string(responses_.size()) + " responses");
}

std::string FailingModelClient::complete(const std::vector<ChatMessage>&) {
    throw Error(ErrorCode::model_error, "model client configured to fail");
}

HttpModelClient::HttpModelClient(EndpointConfig config) : config_(std::move(config)) {}

std::string HttpModelClient::complete(const std::vector<ChatMessage>& messages) {
    json body{{"model", config_.model}, {"temperature", config_.temperature}};
    body["messages"] = json::array();
    for (auto& m : messages) body["messages"].push_back(m.to_json());

    httplib::Client client(config_.base_url);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorCode::model_error,
                    "endpoint unreachable: " + config_.base_url);
    }
    if (res->status != 200) {
        throw Error(ErrorCode::model_error,
                    "endpoint returned status " + std::to_string(res->status));
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
        throw Error(ErrorCode::model_error, "endpoint reply missing choices");
    }
    return reply["choices"][0]["message"]["content"].get<std::string>();
}

namespace {

std::vector<std::string> read_role(const json& doc, const std::string& role) {
    std::vector<std::string> out;
    if (doc.contains(role) && doc[role].is_array()) {
        for (auto& r : doc[role]) out.push_back(r.get<std::string>());
    }
    return out;
}

std::string read_fallback(const json& doc, const std::string& role) {
    if (doc.contains("fallbacks") && doc["fallbacks"].contains(role)) {
        return doc["fallbacks"][role].get<std::string>();
    }
    return "";
}

}  // namespace

ScriptSet script_set_from_json(const json& doc) {
    ScriptSet set;
    set.main = std::make_shared<ScriptedModelClient>(read_role(doc, "main"),
                                                     read_fallback(doc, "main"));
    set.verifier = std::make_shared<ScriptedModelClient>(read_role(doc, "verifier"),
                                                         read_fallback(doc, "verifier"));
    set.environment = std::make_shared<ScriptedModelClient>(read_role(doc, "environment"),
                                                            read_fallback(doc, "environment"));
    set.judge = std::make_shared<ScriptedModelClient>(read_role(doc, "judge"),
                                                      read_fallback(doc, "judge"));
    return set;
}

ScriptSet load_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open script file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::parse_error, "script file is not a JSON object: " + path);
    }
    return script_set_from_json(doc);
}

}  // namespace juris::model
