#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace matcha {

/// Named prompt templates with {{placeholder}} substitution.
///
/// Built-in defaults cover every agent; a directory of `<name>.txt` files
/// (plus an optional VERSION file) overrides them one by one.
class PromptSet {
public:
    PromptSet();

    static PromptSet load_overrides(const std::filesystem::path& dir);

    const std::string& version() const { return version_; }
    const std::string& raw(std::string_view name) const;  // throws ConfigError
    void set(const std::string& name, std::string body) { templates_[name] = std::move(body); }

    // Unknown placeholders are left verbatim.
    std::string render(std::string_view name, const std::map<std::string, std::string>& vars) const;

private:
    std::string version_;
    std::map<std::string, std::string, std::less<>> templates_;
};

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& vars);

}  // namespace matcha
