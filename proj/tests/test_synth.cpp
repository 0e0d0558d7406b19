#include "tsqa/synth.hpp"

#include "tsqa/genpool.hpp"
#include "tsqa/prng.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

using namespace tsqa;
using namespace tsqa::testing;
using genpool::AttributePool;
using genpool::LocalFluctuation;
using genpool::SeasonalityAttr;

TEST_CASE("steady noise-free pool renders a constant line") {
    auto pool = steady_pool(5.0);
    auto series = synth::render(pool);
    REQUIRE(series.values.size() == 256);
    for (double v : series.values) CHECK(v == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("sine pool renders with exact period and half peak-to-peak amplitude") {
    auto pool = steady_pool(10.0);
    SeasonalityAttr s;
    s.kind = taxonomy::SeasonKind::sine;
    s.period = 32;
    s.amplitude = 2.0;
    s.phase = 0.0;
    pool.seasonality = s;

    auto series = synth::render(pool);
    for (std::size_t i = 0; i + 32 < series.values.size(); ++i)
        CHECK(series.values[i] == doctest::Approx(series.values[i + 32]).epsilon(1e-9));
    auto [mn, mx] = std::minmax_element(series.values.begin(), series.values.end());
    CHECK(*mx - *mn == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("spike overlay places the peak exactly") {
    auto pool = steady_pool(10.0);
    LocalFluctuation f;
    f.kind = taxonomy::FluctuationKind::upward_spike;
    f.position = 100;
    f.duration = 1;
    f.amplitude = 5.0;
    pool.fluctuations = {f};

    auto series = synth::render(pool);
    auto argmax = static_cast<std::size_t>(
        std::distance(series.values.begin(),
                      std::max_element(series.values.begin(), series.values.end())));
    CHECK(argmax == 100);
    CHECK(series.values[100] - 10.0 == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(series.values[99] == doctest::Approx(10.0));
    CHECK(series.values[101] == doctest::Approx(10.0));
}

TEST_CASE("render is deterministic for a fixed pool") {
    auto subset = full_subset(generic_metric());
    auto pool = genpool::sample_pool(subset, 512, 2024);
    auto a = synth::render(pool);
    auto b = synth::render(pool);
    CHECK(a.values == b.values);
}

TEST_CASE("temporary flatline pins values and excludes noise") {
    auto subset = full_subset(generic_metric());
    auto pool = genpool::sample_pool(subset, 256, 5);
    pool.noise = {taxonomy::NoiseKind::gaussian, 1.0};
    pool.fluctuations.clear();
    LocalFluctuation f;
    f.kind = taxonomy::FluctuationKind::temporary_flatline;
    f.position = 50;
    f.duration = 20;
    f.amplitude = 0.0;
    pool.fluctuations = {f};

    auto series = synth::render(pool);
    for (std::size_t t = 50; t < 70; ++t) CHECK(series.values[t] == series.values[50]);
}

TEST_CASE("gap windows pin to the metric's gap value") {
    auto metric = generic_metric("requests_count", 0.0, 5000.0, true);
    auto pool = steady_pool(1000.0);
    pool.metric = metric;
    LocalFluctuation f;
    f.kind = taxonomy::FluctuationKind::gap;
    f.position = 30;
    f.duration = 10;
    pool.fluctuations = {f};
    auto series = synth::render(pool);
    double pin = genpool::gap_pin_value(metric);
    CHECK(pin == 0.0);
    for (std::size_t t = 30; t < 40; ++t) CHECK(series.values[t] == pin);
}

TEST_CASE("normalize matches the worked examples") {
    synth::TimeSeries s{"m", {2.0, 4.0, 6.0}};
    auto n = synth::normalize(s);
    CHECK(n.value_scaling == 4.0);
    CHECK(n.value_offset == 2.0);
    REQUIRE(n.values.size() == 3);
    CHECK(n.values[0] == 0.0);
    CHECK(n.values[1] == 0.5);
    CHECK(n.values[2] == 1.0);

    synth::TimeSeries constant{"m", {7.0, 7.0, 7.0}};
    auto nc = synth::normalize(constant);
    CHECK(nc.value_scaling == 1.0);
    CHECK(nc.value_offset == 7.0);
    for (double v : nc.values) CHECK(v == 0.0);
}

TEST_CASE("denormalize inverts the worked examples") {
    synth::NormalizedSeries n{"m", {0.0, 0.5, 1.0}, 4.0, 2.0};
    auto s = synth::denormalize(n);
    CHECK(s.values == std::vector<double>{2.0, 4.0, 6.0});

    synth::NormalizedSeries nc{"m", {0.0, 0.0, 0.0}, 1.0, 7.0};
    CHECK(synth::denormalize(nc).values == std::vector<double>{7.0, 7.0, 7.0});
}

TEST_CASE("normalization round trip is lossless within 1e-9 relative") {
    auto subset = full_subset(generic_metric("roundtrip", -3000.0, 4000.0, false));
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto pool = genpool::sample_pool(subset, 128 + (i % 512), Rng::split(606, i));
        auto raw = synth::render(pool);
        auto back = synth::denormalize(synth::normalize(raw));
        REQUIRE(back.values.size() == raw.values.size());
        for (std::size_t t = 0; t < raw.values.size(); ++t) {
            double scale = std::max(1.0, std::fabs(raw.values[t]));
            CHECK(std::fabs(back.values[t] - raw.values[t]) <= 1e-9 * scale);
        }
        auto n = synth::normalize(raw);
        for (double v : n.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("csv export writes the documented header") {
    synth::TimeSeries s{"m", {1.5, 2.5}};
    synth::write_csv(s, "/tmp/tsqa_series.csv");
    std::ifstream in("/tmp/tsqa_series.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,value");
    std::getline(in, line);
    CHECK(line == "0,1.5");
}
