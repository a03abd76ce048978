#include "juris/prompts.hpp"

#include <fstream>
#include <sstream>

#include "juris/errors.hpp"

namespace juris::prompts {

namespace fs = std::filesystem;

PromptLibrary::PromptLibrary(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::io_error, "prompt directory not found: " + dir.string());
    }
    for (auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path());
        std::ostringstream buf;
        buf << in.rdbuf();
        prompts_[entry.path().stem().string()] = buf.str();
    }
}

const std::string& PromptLibrary::get(const std::string& name) const {
    auto it = prompts_.find(name);
    if (it == prompts_.end()) {
        throw Error(ErrorCode::not_found, "no such prompt: " + name);
    }
    return it->second;
}

std::string PromptLibrary::substitute(const std::string& tpl,
                                      const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            std::size_t close = tpl.find('}', i + 1);
            if (close != std::string::npos) {
                auto key = tpl.substr(i + 1, close - i - 1);
                auto it = vars.find(key);
                if (it != vars.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i]);
        ++i;
    }
    return out;
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& vars) const {
    return substitute(get(name), vars);
}

}  // namespace juris::prompts
