#include "lrbench/defaults.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "lrbench/errors.hpp"

namespace lrbench {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(std::string_view text, std::string_view key) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("defaults: value for '" + std::string(key) + "' is not a number: '" +
                          std::string(text) + "'");
    }
    return value;
}

}  // namespace

Defaults::Defaults()
    : values_{
          // shared by the momentum-SGD family
          {"sgd.momentum", 0.9},
          {"sgd.weight_decay", 1e-4},
          // shared by the Adam family
          {"adam.beta1", 0.9},
          {"adam.beta2", 0.999},
          {"adam.eps", 1e-8},

          {"fixed_sgd.lr", 0.01},
          {"cosine_sgd.lr", 0.05},
          {"sgdr.lr", 0.05},
          {"sgdr.restart_epochs", 10},
          {"sgdr.restart_mult", 2},
          {"adam.lr", 3e-4},
          {"adamw.lr", 3e-4},
          {"adamw.weight_decay", 1e-2},
          {"adabound.lr", 3e-4},
          {"adabound.final_lr", 0.01},
          {"lars.lr", 0.001},
          {"discriminative.lr", 0.05},
          {"discriminative.delta", 2.6},
          {"radam.lr", 3e-4},
          {"lion.lr", 1e-4},
          {"lion.beta1", 0.9},
          {"lion.beta2", 0.99},
          {"lion.weight_decay", 1e-2},
          {"lookahead_adamw.lr", 3e-4},
          {"lookahead_adamw.weight_decay", 1e-2},
          {"lookahead_adamw.k", 5},
          {"lookahead_adamw.alpha", 0.5},
          {"sam.lr", 0.05},
          {"sam.rho", 0.05},
          {"grokfast.lr", 0.01},
          {"grokfast.alpha", 0.98},
          {"stlr_discriminative.lr", 0.01},
          {"stlr_discriminative.delta", 2.6},
          {"stlr_discriminative.cut_frac", 0.1},
          {"stlr_discriminative.ratio", 32},
          {"sam_discriminative.lr", 0.05},
          {"sam_discriminative.delta", 2.6},
          {"sam_discriminative.rho", 0.05},

          {"dals.lr", 0.03},
          {"dals.momentum", 0.9},
          {"dals.warmup_frac", 0.05},
          {"dals.alpha0", 0.6},
          {"dals.trust_coef", 0.02},
          {"dals.trust_min", 0.2},
          {"dals.trust_max", 5.0},
          {"dals.weight_decay", 1e-4},
          {"dals_fast.lr", 0.05},
          {"dals_fast.momentum", 0.85},
          {"dals_fast.warmup_frac", 0.02},
          {"dals_acc.alpha0", 0.7},
          {"dals_acc.weight_decay", 5e-4},
          {"dals_acc.restart_epochs", 10},
          {"dals_acc.restart_mult", 2},
      } {}

double Defaults::get(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("defaults: unknown key '" + std::string(key) + "'");
    return it->second;
}

bool Defaults::contains(std::string_view key) const { return values_.find(key) != values_.end(); }

void Defaults::set(std::string_view key, double value) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("defaults: unknown key '" + std::string(key) + "'");
    it->second = value;
}

void Defaults::apply(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("defaults: expected key=value, got '" + std::string(assignment) + "'");
    }
    const auto key = trim(assignment.substr(0, eq));
    set(key, parse_number(trim(assignment.substr(eq + 1)), key));
}

void Defaults::load(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (!view.empty()) apply(view);
    }
}

void Defaults::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("defaults: cannot open " + path.string());
    load(in);
}

void Defaults::save(std::ostream& out) const {
    const auto precision = out.precision(17);
    for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
    out.precision(precision);
}

}  // namespace lrbench
