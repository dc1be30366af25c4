#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "lrbench/errors.hpp"
#include "lrbench/synthdata.hpp"

using namespace lrbench;

namespace {

const Dataset& benchmark_data() {
    static const Dataset data = generate(DataConfig{});
    return data;
}

std::size_t first_max(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

TEST_CASE("default protocol shapes") {
    const auto& d = benchmark_data();
    CHECK(d.train_x.rows() == 6400);
    CHECK(d.test_x.rows() == 1600);
    CHECK(d.train_x.cols() == 64);
    CHECK(d.test_x.cols() == 64);
    CHECK(d.train_y.size() == 6400);
    CHECK(d.test_y.size() == 1600);
}

TEST_CASE("every label is the argmax of the signal block") {
    const auto& d = benchmark_data();
    for (std::size_t i = 0; i < d.train_x.rows(); ++i) {
        REQUIRE(d.train_y[i] == first_max(d.train_x.row(i).first(10)));
    }
    for (std::size_t i = 0; i < d.test_x.rows(); ++i) {
        REQUIRE(d.test_y[i] == first_max(d.test_x.row(i).first(10)));
    }
}

TEST_CASE("class frequencies stay near uniform") {
    const auto& d = benchmark_data();
    std::array<std::size_t, 10> counts{};
    for (auto y : d.train_y) ++counts.at(y);
    for (auto y : d.test_y) ++counts.at(y);
    for (auto c : counts) {
        const double f = static_cast<double>(c) / 8000.0;
        CHECK(f >= 0.07);
        CHECK(f <= 0.13);
    }
}

TEST_CASE("noise coordinates have roughly the configured spread") {
    const auto& d = benchmark_data();
    double ss = 0.0;
    std::size_t n = 0;
    for (const Matrix* m : {&d.train_x, &d.test_x}) {
        for (std::size_t i = 0; i < m->rows(); ++i) {
            for (double v : m->row(i).subspan(10)) {
                ss += v * v;
                ++n;
            }
        }
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    CHECK(sd >= 0.08);
    CHECK(sd <= 0.12);
}

TEST_CASE("same config gives a bit-identical dataset") {
    const Dataset again = generate(DataConfig{});
    CHECK(again.train_x == benchmark_data().train_x);
    CHECK(again.test_x == benchmark_data().test_x);
    CHECK(again.train_y == benchmark_data().train_y);
    CHECK(again.test_y == benchmark_data().test_y);

    DataConfig other;
    other.seed = 43;
    CHECK_FALSE(generate(other).train_x == benchmark_data().train_x);
}

TEST_CASE("a dominant signal scale makes the label the drawn class") {
    DataConfig cfg;
    cfg.n_samples = 2000;
    cfg.signal_scale = 1e9;
    const auto d = generate(cfg);
    // Exactly one signal coordinate carries the added scale, and it is the label.
    for (std::size_t i = 0; i < d.train_x.rows(); ++i) {
        const auto row = d.train_x.row(i);
        std::size_t big = 0;
        for (std::size_t j = 0; j < 10; ++j) big += row[j] > 5e8 ? 1 : 0;
        REQUIRE(big == 1);
        REQUIRE(row[d.train_y[i]] > 5e8);
    }

    cfg.signal_scale = INFINITY;
    const auto inf = generate(cfg);
    for (std::size_t i = 0; i < inf.test_x.rows(); ++i) REQUIRE(std::isinf(inf.test_x(i, inf.test_y[i])));
}

TEST_CASE("split uses floor of the train fraction") {
    DataConfig cfg;
    cfg.n_samples = 101;
    cfg.train_fraction = 0.5;
    const auto d = generate(cfg);
    CHECK(d.train_x.rows() == 50);
    CHECK(d.test_x.rows() == 51);
}

TEST_CASE("invalid configurations are rejected") {
    auto bad = [](auto mutate) {
        DataConfig cfg;
        mutate(cfg);
        CHECK_THROWS_AS(generate(cfg), ConfigError);
    };
    bad([](DataConfig& c) { c.signal_dims = 9; });
    bad([](DataConfig& c) { c.train_fraction = 0.0; });
    bad([](DataConfig& c) { c.train_fraction = 1.0; });
    bad([](DataConfig& c) { c.noise_sigma = -0.1; });
    bad([](DataConfig& c) { c.dim = 5; });
    bad([](DataConfig& c) { c.n_samples = 1; });
    bad([](DataConfig& c) { c.signal_scale = NAN; });
}

TEST_CASE("csv dump writes one row per sample with a trailing label") {
    DataConfig cfg;
    cfg.n_samples = 20;
    const auto d = generate(cfg);
    std::ostringstream out;
    write_csv(d, out);
    std::istringstream in(out.str());
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::size_t commas = 0;
        for (char ch : line) commas += ch == ',' ? 1 : 0;
        CHECK(commas == 64);
        const auto label = std::stoul(line.substr(line.rfind(',') + 1));
        const auto expected = rows < d.train_y.size() ? d.train_y[rows] : d.test_y[rows - d.train_y.size()];
        CHECK(label == expected);
        ++rows;
    }
    CHECK(rows == 20);
}
