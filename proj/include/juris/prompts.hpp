#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace juris::prompts {

// Prompt texts live in data files (one .txt per prompt) so jurisdictions
// and wording can be swapped without rebuilding. Templates use
// {placeholder} substitution.
class PromptLibrary {
public:
    explicit PromptLibrary(const std::filesystem::path& dir);

    const std::string& get(const std::string& name) const;
    bool has(const std::string& name) const { return prompts_.count(name) > 0; }

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& vars) const;

    static std::string substitute(const std::string& tpl,
                                  const std::map<std::string, std::string>& vars);

private:
    std::map<std::string, std::string> prompts_;
};

}  // namespace juris::prompts
