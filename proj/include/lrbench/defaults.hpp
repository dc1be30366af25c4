#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

namespace lrbench {

/// Hyperparameter table keyed as "<group>.<field>" (e.g. "adam.lr").
///
/// The built-in table mirrors config/defaults.conf. Loading a file or calling
/// set() may only overwrite keys that already exist, so typos fail loudly.
class Defaults {
public:
    /// The built-in table.
    Defaults();

    double get(std::string_view key) const;
    void set(std::string_view key, double value);
    /// Parses "key=value" and applies it.
    void apply(std::string_view assignment);
    bool contains(std::string_view key) const;

    /// Applies every "key = value" line. '#' starts a comment; blank lines are skipped.
    void load(std::istream& in);
    void load(const std::filesystem::path& path);

    /// Rendered as a defaults file, keys sorted.
    void save(std::ostream& out) const;

    const std::map<std::string, double, std::less<>>& values() const noexcept { return values_; }

private:
    std::map<std::string, double, std::less<>> values_;
};

}  // namespace lrbench
