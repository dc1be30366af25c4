#include "lrbench/registry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lrbench/errors.hpp"

namespace lrbench {
namespace {

constexpr std::array<RosterEntry, 18> kRoster{{
    {"fixed_sgd", "Fixed SGD", "Gen 1"},
    {"cosine_sgd", "Cosine Decay SGD", "Gen 2"},
    {"sgdr", "SGDR", "Gen 2"},
    {"adam", "Adam", "Gen 3"},
    {"adamw", "AdamW", "Gen 3"},
    {"adabound", "AdaBound", "Gen 3"},
    {"lars", "LARS", "Gen 4"},
    {"discriminative", "Discriminative LR", "Gen 4"},
    {"radam", "RAdam", "Gen 5"},
    {"lion", "Lion", "Gen 5"},
    {"lookahead_adamw", "Lookahead+AdamW", "Gen 5"},
    {"sam", "SAM", "Gen 5"},
    {"grokfast", "Grokfast", "Gen 5"},
    {"stlr_discriminative", "STLR+Discriminative", "Gen 5"},
    {"sam_discriminative", "SAM+Discriminative", "SOTA"},
    {"dals", "DALS", "SOTA"},
    {"dals_fast", "DALS-Fast", "SOTA"},
    {"dals_acc", "DALS-Acc", "SOTA"},
}};

StrategyConfig sgd_family(std::string_view name, const Defaults& d) {
    StrategyConfig c;
    c.name = std::string(name);
    c.rule = UpdateRule::sgd;
    c.lr = d.get(std::string(name) + ".lr");
    c.momentum = d.get("sgd.momentum");
    c.weight_decay = d.get("sgd.weight_decay");
    return c;
}

StrategyConfig adam_family(std::string_view name, UpdateRule rule, const Defaults& d) {
    StrategyConfig c;
    c.name = std::string(name);
    c.rule = rule;
    c.lr = d.get(std::string(name) + ".lr");
    c.beta1 = d.get("adam.beta1");
    c.beta2 = d.get("adam.beta2");
    c.eps = d.get("adam.eps");
    c.weight_decay = 0.0;
    return c;
}

std::int64_t as_count(double v, std::string_view key) {
    if (!(v >= 1.0) || v != std::floor(v)) {
        throw ConfigError("defaults: '" + std::string(key) + "' must be a positive integer");
    }
    return static_cast<std::int64_t>(v);
}

DalsConfig dals_config(std::string_view name, const Defaults& d) {
    DalsConfig c = name == "dals_fast" ? DalsConfig::fast()
                   : name == "dals_acc" ? DalsConfig::acc()
                                        : DalsConfig::base();
    c.name = std::string(name);
    // Shared DALS settings first, then the variant's overrides.
    c.lr = d.get("dals.lr");
    c.momentum = d.get("dals.momentum");
    c.warmup_frac = d.get("dals.warmup_frac");
    c.alpha0 = d.get("dals.alpha0");
    c.trust_coef = d.get("dals.trust_coef");
    c.trust_min = d.get("dals.trust_min");
    c.trust_max = d.get("dals.trust_max");
    c.eps = d.get("adam.eps");
    c.weight_decay = d.get("dals.weight_decay");
    if (c.variant == DalsVariant::fast) {
        c.lr = d.get("dals_fast.lr");
        c.momentum = d.get("dals_fast.momentum");
        c.warmup_frac = d.get("dals_fast.warmup_frac");
    } else if (c.variant == DalsVariant::acc) {
        c.alpha0 = d.get("dals_acc.alpha0");
        c.weight_decay = d.get("dals_acc.weight_decay");
        c.restart_epochs = d.get("dals_acc.restart_epochs");
        c.restart_mult = d.get("dals_acc.restart_mult");
    }
    c.validate();
    return c;
}

}  // namespace

std::span<const RosterEntry> roster() { return kRoster; }

bool is_known_strategy(std::string_view name) {
    return std::any_of(kRoster.begin(), kRoster.end(), [name](const auto& e) { return e.name == name; });
}

const RosterEntry& roster_entry(std::string_view name) {
    for (const auto& e : kRoster) {
        if (e.name == name) return e;
    }
    throw ConfigError("unknown strategy '" + std::string(name) + "'; valid: " + roster_names());
}

std::string roster_names() {
    std::string out;
    for (const auto& e : kRoster) {
        if (!out.empty()) out += ',';
        out += e.name;
    }
    return out;
}

StrategySpec strategy_spec(std::string_view name, const Defaults& d) {
    roster_entry(name);  // validates the name
    if (name == "dals" || name == "dals_fast" || name == "dals_acc") return dals_config(name, d);

    StrategyConfig c;
    if (name == "fixed_sgd") {
        c = sgd_family(name, d);
    } else if (name == "cosine_sgd") {
        c = sgd_family(name, d);
        c.schedule = ScheduleKind::cosine;
    } else if (name == "sgdr") {
        c = sgd_family(name, d);
        c.schedule = ScheduleKind::sgdr;
        c.restart_epochs = d.get("sgdr.restart_epochs");
        c.restart_mult = d.get("sgdr.restart_mult");
    } else if (name == "adam") {
        c = adam_family(name, UpdateRule::adam, d);
    } else if (name == "adamw") {
        c = adam_family(name, UpdateRule::adamw, d);
        c.weight_decay = d.get("adamw.weight_decay");
    } else if (name == "adabound") {
        c = adam_family(name, UpdateRule::adabound, d);
        c.final_lr = d.get("adabound.final_lr");
    } else if (name == "lars") {
        c = sgd_family(name, d);
        c.rule = UpdateRule::lars;
        c.eps = d.get("adam.eps");
    } else if (name == "discriminative") {
        c = sgd_family(name, d);
        c.discriminative = true;
        c.delta = d.get("discriminative.delta");
    } else if (name == "radam") {
        c = adam_family(name, UpdateRule::radam, d);
    } else if (name == "lion") {
        c.name = "lion";
        c.rule = UpdateRule::lion;
        c.lr = d.get("lion.lr");
        c.lion_beta1 = d.get("lion.beta1");
        c.lion_beta2 = d.get("lion.beta2");
        c.weight_decay = d.get("lion.weight_decay");
    } else if (name == "lookahead_adamw") {
        c = adam_family(name, UpdateRule::adamw, d);
        c.weight_decay = d.get("lookahead_adamw.weight_decay");
        c.wrapper = Wrapper::lookahead;
        c.lookahead_k = as_count(d.get("lookahead_adamw.k"), "lookahead_adamw.k");
        c.lookahead_alpha = d.get("lookahead_adamw.alpha");
    } else if (name == "sam") {
        c = sgd_family(name, d);
        c.wrapper = Wrapper::sam;
        c.sam_radius = d.get("sam.rho");
    } else if (name == "grokfast") {
        c = sgd_family(name, d);
        c.rule = UpdateRule::grokfast_sgd;
        c.grok_alpha = d.get("grokfast.alpha");
    } else if (name == "stlr_discriminative") {
        c = sgd_family(name, d);
        c.schedule = ScheduleKind::stlr;
        c.discriminative = true;
        c.delta = d.get("stlr_discriminative.delta");
        c.cut_frac = d.get("stlr_discriminative.cut_frac");
        c.stlr_ratio = d.get("stlr_discriminative.ratio");
    } else if (name == "sam_discriminative") {
        c = sgd_family(name, d);
        c.discriminative = true;
        c.delta = d.get("sam_discriminative.delta");
        c.wrapper = Wrapper::sam;
        c.sam_radius = d.get("sam_discriminative.rho");
    }
    c.validate();
    return c;
}

std::string_view spec_name(const StrategySpec& spec) {
    return std::visit([](const auto& c) -> std::string_view { return c.name; }, spec);
}

std::unique_ptr<Optimizer> build_optimizer(const StrategySpec& spec, std::size_t n_layers,
                                           const TrainingHorizon& horizon) {
    if (const auto* dals = std::get_if<DalsConfig>(&spec)) return make_dals(*dals, horizon);
    return make_strategy(std::get<StrategyConfig>(spec), n_layers, horizon);
}

}  // namespace lrbench
