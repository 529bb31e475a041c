#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "sobnn/data.hpp"
#include "sobnn/problems.hpp"
#include "support.hpp"

using namespace sobnn;

namespace {

Dataset tiny_dataset(std::initializer_list<double> xs) {
    Dataset d;
    int i = 0;
    for (double x : xs) {
        SamplePoint s;
        s.x = {x};
        s.y = {2.0 * x + static_cast<double>(i % 3)};  // non-constant output
        s.dy_dx = Matrix(1, 1);
        s.dy_dx(0, 0) = 2.0;
        d.samples.push_back(std::move(s));
        ++i;
    }
    return d;
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("fit_standardize on a two-point column") {
    Dataset d;
    for (double x : {1.0, 3.0}) {
        SamplePoint s;
        s.x = {x};
        s.y = {x * 10.0};
        s.dy_dx = Matrix(1, 1, 10.0);
        d.samples.push_back(s);
    }
    auto [std_d, stats] = fit_standardize(d);
    CHECK(stats.x_mean[0] == doctest::Approx(2.0));
    CHECK(stats.x_std[0] == doctest::Approx(1.0));  // population std
    CHECK(std_d.samples[0].x[0] == doctest::Approx(-1.0));
    CHECK(std_d.samples[1].x[0] == doctest::Approx(+1.0));
    CHECK(std_d.standardized);
}

TEST_CASE("fit_standardize is idempotent") {
    const Dataset grid = sample_grid(builtin("trig"), 9);
    auto [std1, stats1] = fit_standardize(grid);
    auto [std2, stats2] = fit_standardize(std1);
    for (std::size_t e = 0; e < stats2.x_mean.size(); ++e) {
        CHECK(std::abs(stats2.x_mean[e]) <= 1e-10);
        CHECK(std::abs(stats2.x_std[e] - 1.0) <= 1e-10);
    }
    for (std::size_t i = 0; i < std1.size(); ++i) {
        for (std::size_t e = 0; e < std1.n_in(); ++e)
            CHECK(std::abs(std1.samples[i].x[e] - std2.samples[i].x[e]) <= 1e-12);
        CHECK(std::abs(std1.samples[i].y[0] - std2.samples[i].y[0]) <= 1e-12);
    }
}

TEST_CASE("fit_standardize matches a two-pass oracle on the 625-point grid") {
    const Dataset grid = sample_grid(builtin("trig"), 25);
    auto [std_d, stats] = fit_standardize(grid);
    (void)std_d;

    // two-pass mean/variance oracle on column x1
    double mean = 0.0;
    for (const auto& s : grid.samples) mean += s.x[0];
    mean /= static_cast<double>(grid.size());
    double var = 0.0;
    for (const auto& s : grid.samples) var += (s.x[0] - mean) * (s.x[0] - mean);
    var /= static_cast<double>(grid.size());

    CHECK(std::abs(stats.x_mean[0] - mean) <= 1e-12);
    CHECK(std::abs(stats.x_mean[0]) <= 1e-12);  // symmetric grid
    CHECK(std::abs(stats.x_std[0] - std::sqrt(var)) <= 1e-12);
}

TEST_CASE("fit_standardize needs at least two samples") {
    const Dataset one = tiny_dataset({1.0});
    CHECK_THROWS_AS(fit_standardize(one), std::invalid_argument);
}

TEST_CASE("fit_standardize rejects constant columns by name") {
    Dataset d = tiny_dataset({1.0, 2.0, 3.0});
    for (auto& s : d.samples) s.x[0] = 7.0;
    CHECK_THROWS_WITH_AS(fit_standardize(d).first, doctest::Contains("x1"), std::invalid_argument);

    Dataset d2 = tiny_dataset({1.0, 2.0, 3.0});
    for (auto& s : d2.samples) s.y[0] = 0.5;
    CHECK_THROWS_WITH_AS(fit_standardize(d2).first, doctest::Contains("y1"), std::invalid_argument);
}

TEST_CASE("scale_sensitivities hand cases") {
    StandardizationStats st;
    st.x_mean = {0.0};
    st.x_std = {0.5};
    st.y_mean = {0.0};
    st.y_std = {2.0};
    SamplePoint s;
    s.x = {0.0};
    s.y = {0.0};
    s.dy_dx = Matrix(1, 1, 2.0);
    CHECK(scale_sensitivities(s, st).dy_dx(0, 0) == doctest::Approx(0.5));

    st.y_std = {0.5};  // sigma_x == sigma_y leaves sensitivities unchanged
    CHECK(scale_sensitivities(s, st).dy_dx(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("scaled sensitivities match finite differences of standardized data") {
    const AnalyticProblem prob = builtin("trig");
    const Dataset grid = sample_grid(prob, 15);
    auto [std_d, stats] = fit_standardize(grid);
    (void)std_d;

    Rng rng(31);
    const double h = 1e-5;
    for (int rep = 0; rep < 30; ++rep) {
        Vector x{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
        auto [y0, grad] = prob.eval(x);
        (void)y0;
        SamplePoint s;
        s.x = x;
        s.y = {y0};
        s.dy_dx = Matrix(1, 2);
        s.dy_dx(0, 0) = grad[0];
        s.dy_dx(0, 1) = grad[1];
        const SamplePoint scaled = scale_sensitivities(s, stats);

        for (std::size_t j = 0; j < 2; ++j) {
            Vector xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const double yp = (prob.eval(xp).first - stats.y_mean[0]) / stats.y_std[0];
            const double ym = (prob.eval(xm).first - stats.y_mean[0]) / stats.y_std[0];
            const double dx_std = 2.0 * h / stats.x_std[j];
            const double fd = (yp - ym) / dx_std;
            CHECK(std::abs(fd - scaled.dy_dx(0, j)) <= 1e-6);
        }
    }
}

TEST_CASE("apply_standardize round trip and identity stats") {
    const Dataset grid = sample_grid(builtin("peaks"), 7);
    auto [std_d, stats] = fit_standardize(grid);
    const Dataset back = unstandardize(std_d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t e = 0; e < grid.n_in(); ++e)
            CHECK(std::abs(back.samples[i].x[e] - grid.samples[i].x[e]) <= 1e-12);
        CHECK(std::abs(back.samples[i].y[0] - grid.samples[i].y[0]) <= 1e-12);
        for (std::size_t k = 0; k < grid.samples[i].dy_dx.data.size(); ++k)
            CHECK(std::abs(back.samples[i].dy_dx.data[k] - grid.samples[i].dy_dx.data[k]) <= 1e-12);
    }

    StandardizationStats identity;
    identity.x_mean = {0.0, 0.0};
    identity.x_std = {1.0, 1.0};
    identity.y_mean = {0.0};
    identity.y_std = {1.0};
    const Dataset same = apply_standardize(grid, identity);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(same.samples[i].x == grid.samples[i].x);
        CHECK(same.samples[i].y == grid.samples[i].y);
    }
}

TEST_CASE("apply_standardize matches per-sample manual computation") {
    const Dataset grid = sample_grid(builtin("ridge"), 5);
    auto [train, stats] = fit_standardize(grid);
    (void)train;
    const Dataset val = sample_grid(builtin("ridge"), 4);
    const Dataset val_std = apply_standardize(val, stats);
    for (std::size_t i = 0; i < val.size(); ++i) {
        for (std::size_t e = 0; e < val.n_in(); ++e) {
            const double want = (val.samples[i].x[e] - stats.x_mean[e]) / stats.x_std[e];
            CHECK(val_std.samples[i].x[e] == doctest::Approx(want).epsilon(1e-14));
        }
        const double want_y = (val.samples[i].y[0] - stats.y_mean[0]) / stats.y_std[0];
        CHECK(val_std.samples[i].y[0] == doctest::Approx(want_y).epsilon(1e-14));
        for (std::size_t e = 0; e < val.n_in(); ++e) {
            const double want_s =
                val.samples[i].dy_dx(0, e) * stats.x_std[e] / stats.y_std[0];
            CHECK(val_std.samples[i].dy_dx(0, e) == doctest::Approx(want_s).epsilon(1e-14));
        }
    }
}

TEST_CASE("grid_split stride2 is the exact interleave") {
    const Dataset grid = sample_grid(builtin("trig"), 25);
    auto [train, val] = grid_split(grid, 313, 312, SplitPattern::stride2);
    REQUIRE(train.size() == 313);
    REQUIRE(val.size() == 312);
    for (std::size_t k = 0; k < train.size(); ++k)
        CHECK(train.samples[k].x == grid.samples[2 * k].x);
    for (std::size_t k = 0; k < val.size(); ++k)
        CHECK(val.samples[k].x == grid.samples[2 * k + 1].x);
}

TEST_CASE("grid_split seeded honors 320/305 with a disjoint union") {
    const Dataset grid = sample_grid(builtin("trig"), 25);
    auto [train, val] = grid_split(grid, 320, 305, SplitPattern::seeded);
    REQUIRE(train.size() == 320);
    REQUIRE(val.size() == 305);

    auto key = [](const SamplePoint& s) { return std::make_pair(s.x[0], s.x[1]); };
    std::set<std::pair<double, double>> seen;
    for (const auto& s : train.samples) seen.insert(key(s));
    for (const auto& s : val.samples) seen.insert(key(s));
    CHECK(seen.size() == 625);  // disjoint and exhaustive over the grid
}

TEST_CASE("grid_split edge cases") {
    const Dataset grid = sample_grid(builtin("trig"), 5);
    auto [train, val] = grid_split(grid, 25, 0, SplitPattern::seeded);
    CHECK(train.size() == 25);
    CHECK(val.size() == 0);
    CHECK_THROWS_AS(grid_split(grid, 20, 10, SplitPattern::stride2), std::invalid_argument);
    CHECK_THROWS_AS(grid_split(grid, 14, 0, SplitPattern::stride2), std::invalid_argument);
}

TEST_CASE("minibatches cover every index exactly once") {
    Dataset d = tiny_dataset({});
    d.samples.resize(320, SamplePoint{{0.0}, {0.0}, Matrix(1, 1)});
    const MinibatchPlan plan{64, 99};
    const auto slices = minibatches(d, plan, 1);
    CHECK(slices.size() == 5);
    std::set<std::size_t> seen;
    for (const auto& s : slices) {
        CHECK(s.size() == 64);
        seen.insert(s.begin(), s.end());
    }
    CHECK(seen.size() == 320);
}

TEST_CASE("minibatches keep the short final batch and replay per seed") {
    Dataset d = tiny_dataset({});
    d.samples.resize(10, SamplePoint{{0.0}, {0.0}, Matrix(1, 1)});

    const MinibatchPlan plan{64, 5};
    const auto single = minibatches(d, plan, 3);
    REQUIRE(single.size() == 1);
    CHECK(single[0].size() == 10);

    const MinibatchPlan plan3{3, 5};
    const auto a = minibatches(d, plan3, 2);
    const auto b = minibatches(d, plan3, 2);
    CHECK(a == b);  // same seed, same epoch -> identical
    REQUIRE(a.size() == 4);
    CHECK(a.back().size() == 1);
    const auto c = minibatches(d, plan3, 4);
    CHECK(a != c);  // fresh shuffle per epoch
}

TEST_CASE("csv round trip preserves values") {
    const Dataset grid = sample_grid(builtin("peaks"), 4);
    const std::string path = temp_path("sobnn_roundtrip.csv");
    write_csv(grid, path);
    const Dataset back = read_csv(path);
    REQUIRE(back.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(back.samples[i].x == grid.samples[i].x);
        CHECK(back.samples[i].y == grid.samples[i].y);
        CHECK(back.samples[i].dy_dx.data == grid.samples[i].dy_dx.data);
    }
    std::filesystem::remove(path);
}

TEST_CASE("csv parses a well-formed 3-row file") {
    const std::string path = temp_path("sobnn_small.csv");
    {
        std::ofstream out(path);
        out << "x1,x2,y1,dy1_dx1,dy1_dx2\n";
        out << "0.5,-1,2,3,4\n";
        out << "1.5,0,1e-3,-3.25,0.0\n";
        out << "-0.25,2,0,1,2\n";
    }
    const Dataset d = read_csv(path);
    REQUIRE(d.size() == 3);
    CHECK(d.samples[1].y[0] == doctest::Approx(1e-3));
    CHECK(d.samples[2].dy_dx(0, 1) == doctest::Approx(2.0));
    std::filesystem::remove(path);
}

TEST_CASE("csv errors name the offending column or line") {
    const std::string path = temp_path("sobnn_bad.csv");
    {
        std::ofstream out(path);
        out << "x1,x2,y1,dy1_dx1\n0,0,0,0\n";  // dy1_dx2 missing
    }
    CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("dy1_dx2"), std::runtime_error);

    {
        std::ofstream out(path);
        out << "x1,x2,y1,dy1_dx1,dy1_dx2\n0,0,abc,0,0\n";
    }
    CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("line 2"), std::runtime_error);

    {
        std::ofstream out(path);
        out << "x1,x2,y1,dy1_dx1,dy1_dx2\n0,0,1,0,0\n0,0,1,0\n";
    }
    CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("line 3"), std::runtime_error);
    std::filesystem::remove(path);
}

}  // TEST_SUITE
