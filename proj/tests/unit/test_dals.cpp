#include <doctest.h>

#include <cmath>
#include <vector>

#include "lrbench/errors.hpp"
#include "lrbench/registry.hpp"
#include "oracle_checks.hpp"
#include "scalar_oracles.hpp"

using namespace lrbench;

namespace {

const TrainingHorizon kHorizon{8000, 100};

/// 1-1-1 network with every slot set to `v`.
Model scalar_model(std::array<double, 4> v) {
    Model m({1, 1, 1});
    for (std::size_t s = 0; s < 4; ++s) m.slots()[s].values(0, 0) = v[s];
    m.mark_updated();
    return m;
}

void set_grads(Model& m, std::array<double, 4> g) {
    for (std::size_t s = 0; s < 4; ++s) m.slots()[s].grad(0, 0) = g[s];
}

}  // namespace

TEST_CASE("constant loss settles into refinement") {
    PhaseDetector d;
    CHECK(d.update(1.5) == Phase::exploration);
    CHECK_FALSE(d.improvement().has_value());
    for (int i = 0; i < 5; ++i) CHECK(d.update(1.5) == Phase::refinement);
    CHECK(*d.improvement() == 0.0);
}

TEST_CASE("halving losses read as exploration") {
    PhaseDetector d;
    double loss = 8.0;
    d.update(loss);
    for (int i = 0; i < 6; ++i) {
        loss *= 0.5;
        CHECK(d.update(loss) == Phase::exploration);
    }
}

TEST_CASE("an engineered improvement of 0.005 is exploitation") {
    // ema' = 0.95 ema + 0.05 L gives delta = 0.05 (1 - L / ema); L = 0.9 ema gives 0.005.
    PhaseDetector d;
    d.update(2.0);
    CHECK(d.update(1.8) == Phase::exploitation);
    CHECK(*d.improvement() == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(*d.loss_ema() == doctest::Approx(1.99));
}

TEST_CASE("phase regions partition the line") {
    const PhaseDetector d;
    CHECK(d.classify(0.0100000001) == Phase::exploration);
    CHECK(d.classify(0.01) == Phase::exploitation);
    CHECK(d.classify(0.0020000001) == Phase::exploitation);
    CHECK(d.classify(0.002) == Phase::refinement);
    CHECK(d.classify(-5.0) == Phase::refinement);
    for (double x = -0.05; x <= 0.05; x += 1e-4) {
        const Phase p = d.classify(x);
        CHECK((p == Phase::exploration) == (x > 0.01));
        CHECK((p == Phase::exploitation) == (x > 0.002 && x <= 0.01));
        CHECK((p == Phase::refinement) == (x <= 0.002));
    }
}

TEST_CASE("phase detector matches an independent replay") {
    const std::vector<double> losses{2.3, 2.1, 1.7, 1.6, 1.62, 1.55, 1.54, 1.58, 1.5, 1.49, 1.49, 1.2};
    PhaseDetector d;
    oracle::Phases ref;
    for (double l : losses) CHECK(static_cast<int>(d.update(l)) == ref.observe(l));
}

TEST_CASE("non-finite losses are rejected") {
    PhaseDetector d;
    CHECK_THROWS_AS(d.update(NAN), ConfigError);
    CHECK_THROWS_AS(d.update(INFINITY), ConfigError);
}

TEST_CASE("published values") {
    for (const auto& c : testsupport::published_value_checks()) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.ok);
    }
}

TEST_CASE("adaptive alpha stays in its band") {
    for (double a0 = 0.3; a0 < 0.9; a0 += 0.01) {
        for (auto p : {Phase::exploration, Phase::exploitation, Phase::refinement}) {
            const double a = adaptive_alpha(p, a0);
            CHECK(a >= 0.3);
            CHECK(a <= 0.9);
        }
        CHECK(adaptive_alpha(Phase::exploitation, a0) == a0);
    }
    // below the band only the exploration floor holds
    CHECK(adaptive_alpha(Phase::exploration, 0.1) == 0.3);
    CHECK(adaptive_alpha(Phase::refinement, 0.1) == doctest::Approx(0.2));
    CHECK(adaptive_alpha(Phase::refinement, 0.85) == 0.9);
    CHECK(adaptive_alpha(Phase::exploration, 0.9) == doctest::Approx(0.6));
}

TEST_CASE("depth blend endpoints and affine identity") {
    const std::vector<double> g{1.0, -2.0, 0.5};
    const std::vector<double> e{0.2, 0.4, -1.0};
    const auto bottom = depth_blend(g, e, 0.0);
    const auto top = depth_blend(g, e, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(bottom[i] == doctest::Approx(0.3 * g[i] + 0.7 * e[i]).epsilon(1e-15));
        CHECK(top[i] == doctest::Approx(0.7 * g[i] + 0.3 * e[i]).epsilon(1e-15));
    }
    for (double d = 0.0; d <= 1.0; d += 0.125) {
        const auto same = depth_blend(g, g, d);
        CHECK(same == g);
        // the filtered-signal weight falls with depth
        const auto unit = depth_blend(std::vector<double>{0.0}, std::vector<double>{1.0}, d);
        CHECK(unit[0] == doctest::Approx(0.7 - 0.4 * d).epsilon(1e-15));
    }
    std::vector<double> out(2);
    CHECK_THROWS_AS(depth_blend(g, e, 0.5, out), ConfigError);
}

TEST_CASE("trust ratio examples and clamp") {
    CHECK(trust_ratio(100.0, 1.0) == doctest::Approx(2.0 / (1.0 + 1e-8)).epsilon(1e-15));
    CHECK(trust_ratio(1e6, 1.0) == 5.0);
    CHECK(trust_ratio(0.0, 3.0) == 0.2);
    CHECK(trust_ratio(0.0, 0.0) == 0.2);
    CHECK(trust_ratio(1.0, 0.0) == 5.0);
    for (double p : {0.0, 1e-3, 0.5, 3.0, 1e4}) {
        for (double g : {0.0, 1e-6, 0.1, 10.0, 1e8}) {
            const double r = trust_ratio(p, g);
            CHECK(r >= 0.2);
            CHECK(r <= 5.0);
        }
    }
}

TEST_CASE("variant configurations") {
    const auto base = DalsConfig::base();
    CHECK(base.lr == 0.03);
    CHECK(base.momentum == 0.9);
    CHECK(base.warmup_frac == 0.05);
    CHECK(base.alpha0 == 0.6);
    CHECK(base.trust_coef == 0.02);
    CHECK(base.weight_decay == 1e-4);
    const auto fast = DalsConfig::fast();
    CHECK(fast.variant == DalsVariant::fast);
    CHECK(fast.lr == 0.05);
    CHECK(fast.momentum == 0.85);
    CHECK(fast.warmup_frac == 0.02);
    const auto acc = DalsConfig::acc();
    CHECK(acc.variant == DalsVariant::acc);
    CHECK(acc.weight_decay == 5e-4);
    CHECK(acc.alpha0 == 0.7);
    CHECK(acc.restart_epochs == 10.0);
    CHECK(acc.restart_mult == 2.0);

    for (const char* name : {"dals", "dals_fast", "dals_acc"}) {
        const auto spec = std::get<DalsConfig>(strategy_spec(name));
        CHECK(spec.name == name);
    }
    CHECK(std::get<DalsConfig>(strategy_spec("dals_fast")).lr == 0.05);
    CHECK(std::get<DalsConfig>(strategy_spec("dals_acc")).alpha0 == 0.7);
}

TEST_CASE("invalid dals configurations are rejected") {
    auto bad = [](auto mutate) {
        DalsConfig c;
        mutate(c);
        CHECK_THROWS_AS(make_dals(c, kHorizon), ConfigError);
    };
    bad([](DalsConfig& c) { c.trust_min = 6.0; });
    bad([](DalsConfig& c) { c.alpha0 = 1.0; });
    bad([](DalsConfig& c) { c.warmup_frac = 1.0; });
    bad([](DalsConfig& c) { c.momentum = -0.1; });
    bad([](DalsConfig& c) { c.lr = INFINITY; });
    bad([](DalsConfig& c) { c.restart_mult = 0.5; });
    CHECK_THROWS_AS(make_dals(DalsConfig{}, TrainingHorizon{0, 1}), ConfigError);
}

TEST_CASE("schedules per variant") {
    const DalsSchedule base(DalsConfig::base(), kHorizon);
    CHECK(base.warmup_steps() == 400.0);
    CHECK(base.multiplier(0) == 0.0);
    CHECK(base.multiplier(200) == doctest::Approx(0.5));
    CHECK(base.multiplier(400) == doctest::Approx(1.0));
    CHECK(base.multiplier(8000) == doctest::Approx(0.0).epsilon(1e-15));

    const DalsSchedule fast(DalsConfig::fast(), kHorizon);
    CHECK(fast.warmup_steps() == 160.0);

    // acc: warmup, then restarts every 1000, 2000, ... steps counted from W
    const DalsSchedule acc(DalsConfig::acc(), kHorizon);
    CHECK(acc.multiplier(200) == doctest::Approx(0.5));
    CHECK(acc.multiplier(400) == 1.0);
    CHECK(acc.multiplier(1399) < 1e-4);
    CHECK(acc.multiplier(1400) == 1.0);
    CHECK(acc.multiplier(3400) == 1.0);
    CHECK(acc.multiplier(900) == doctest::Approx(oracle::sgdr_lr(500, 1000, 2, 1.0, 0.0)).epsilon(1e-14));
}

TEST_CASE("reduction identities hold exactly") {
    for (const auto& c : testsupport::reduction_checks()) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.ok);
    }
}

TEST_CASE("dals family matches the scalar oracle over five steps") {
    for (const char* name : {"dals", "dals_fast", "dals_acc"}) {
        const auto spec = testsupport::trace_spec(name);
        const double d = testsupport::max_abs_diff(testsupport::library_trace(spec), testsupport::oracle_trace(spec));
        INFO(name << " max |diff| " << d);
        CHECK(d <= 1e-12);
    }
}

TEST_CASE("two-step scalar trace at depth one half in exploitation") {
    DalsConfig c;
    c.alpha0 = 0.6;
    c.warmup_frac = 0.0;
    auto opt = make_dals(c, TrainingHorizon{10, 5});
    opt->force_phase(Phase::exploitation);

    // three layers put w1 and b1 at depth 1/2
    Model m({1, 1, 1, 1});
    m.weight(1).values(0, 0) = 0.9;
    m.bias(1).values(0, 0) = -0.4;
    m.mark_updated();
    REQUIRE(m.weight(1).depth_ratio == 0.5);
    oracle::DalsScalar w1{0.5}, b1{0.5};
    double tw = 0.9, tb = -0.4;
    const std::array<std::array<double, 2>, 2> grads{{{0.3, -0.1}, {-0.2, 0.25}}};
    for (std::size_t t = 0; t < 2; ++t) {
        m.zero_grad();
        m.weight(1).grad(0, 0) = grads[t][0];
        m.bias(1).grad(0, 0) = grads[t][1];
        opt->step(m, {}, 1.0);
        const double lr = 0.03 * oracle::warmup_cosine_lr(static_cast<double>(t), 0.0, 10.0);
        tw = w1.step(tw, grads[t][0], lr, 0.6, false);
        tb = b1.step(tb, grads[t][1], lr, 0.6, false);
        CHECK(std::abs(m.weight(1).values(0, 0) - tw) <= 1e-12);
        CHECK(std::abs(m.bias(1).values(0, 0) - tb) <= 1e-12);
    }
    CHECK(std::abs(tw - 0.9) > 1e-4);
}

TEST_CASE("fast variant bypasses the filter in exploration") {
    DalsConfig c = DalsConfig::fast();
    c.weight_decay = 0.0;
    auto opt = make_dals(c, TrainingHorizon{10, 5});
    opt->force_phase(Phase::exploration);
    Model m = scalar_model({1.0, 0.5, -2.0, 0.1});
    set_grads(m, {0.4, -0.3, 0.2, 0.0});
    opt->step(m, {}, 1.0);
    set_grads(m, {0.4, -0.3, 0.2, 0.0});
    opt->step(m, {}, 1.0);
    for (const auto& st : opt->states()) CHECK(st.grad_ema.flat()[0] == 0.0);
    // the momentum buffer accumulated raw gradients
    CHECK(opt->states()[0].momentum.flat()[0] == doctest::Approx(0.4 + 0.85 * 0.4).epsilon(1e-15));

    // outside exploration the filter runs
    opt->force_phase(Phase::exploitation);
    set_grads(m, {0.4, -0.3, 0.2, 0.0});
    opt->step(m, {}, 1.0);
    CHECK(opt->states()[0].grad_ema.flat()[0] != 0.0);
}

TEST_CASE("base variant filters in exploration") {
    auto opt = make_dals(DalsConfig::base(), TrainingHorizon{10, 5});
    opt->force_phase(Phase::exploration);
    Model m = scalar_model({1.0, 0.5, -2.0, 0.1});
    set_grads(m, {0.4, -0.3, 0.2, 0.0});
    opt->step(m, {}, 1.0);
    CHECK(opt->states()[0].grad_ema.flat()[0] == doctest::Approx(0.7 * 0.4));
}

TEST_CASE("trace rows record one entry per step") {
    auto opt = make_dals(DalsConfig::base(), TrainingHorizon{20, 4});
    std::vector<DalsTraceRow> rows;
    opt->set_trace(&rows);
    Model m = scalar_model({1.0, 0.5, -2.0, 0.1});
    const std::vector<double> losses{2.0, 1.5, 1.9, 2.2, 1.78};
    for (double loss : losses) {
        set_grads(m, {0.4, -0.3, 0.2, 0.1});
        opt->step(m, {}, loss);
    }
    REQUIRE(rows.size() == 5);
    const std::array<Phase, 5> expected{Phase::exploration, Phase::exploration, Phase::refinement,
                                        Phase::refinement, Phase::exploitation};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].step == static_cast<std::int64_t>(i));
        CHECK(rows[i].phase == expected[i]);
        CHECK(rows[i].lr == opt->learning_rate(0, static_cast<std::int64_t>(i)));
        REQUIRE(rows[i].alpha.size() == 2);
        CHECK(rows[i].alpha[0] == adaptive_alpha(expected[i], 0.6));
        REQUIRE(rows[i].trust.size() == 4);
        for (double r : rows[i].trust) {
            CHECK(r >= 0.2);
            CHECK(r <= 5.0);
        }
    }
    opt->set_trace(nullptr);
    set_grads(m, {0.4, -0.3, 0.2, 0.1});
    opt->step(m, {}, 1.7);
    CHECK(rows.size() == 5);
    CHECK(opt->steps_taken() == 6);
}

TEST_CASE("non-finite values abort with slot and step") {
    auto opt = make_dals(DalsConfig::base(), kHorizon);
    Model m = scalar_model({1.0, 0.5, -2.0, 0.1});
    set_grads(m, {0.1, 0.1, NAN, 0.1});
    try {
        opt->step(m, {}, 1.0);
        FAIL("expected an abort");
    } catch (const StrategyAbort& e) {
        CHECK(e.slot() == "w1");
        CHECK(e.step() == 0);
        CHECK(e.strategy() == "dals");
    }
    set_grads(m, {0.1, 0.1, 0.1, 0.1});
    CHECK_THROWS_AS(opt->step(m, {}, NAN), StrategyAbort);
}

TEST_CASE("decoupled decay shrinks after the momentum step") {
    DalsConfig c;
    c.weight_decay = 0.1;
    c.warmup_frac = 0.0;
    auto opt = make_dals(c, TrainingHorizon{1000, 10});
    Model m = scalar_model({2.0, 0.0, 0.0, 0.0});
    set_grads(m, {0.0, 0.0, 0.0, 0.0});
    opt->step(m, {}, 1.0);
    // zero gradient: only the shrink applies, at eta_0 since cosine(0) = 1
    CHECK(m.weight(0).values(0, 0) == doctest::Approx(2.0 - 0.03 * 0.1 * 2.0).epsilon(1e-15));
}
