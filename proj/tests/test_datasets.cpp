#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "pulseforge/datasets.hpp"
#include "pulseforge/rng.hpp"

using namespace pulseforge;

namespace {
constexpr double pi = std::numbers::pi;

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}
}  // namespace

TEST_CASE("load_csv parses rows and rejects bad labels") {
    const std::string path = temp_path("pf_ds_basic.csv");
    write_text(path, "0.1,0.2,0.3,1\n-0.5,0.0,0.25,0\n");
    const RawTable table = load_csv(path);
    REQUIRE(table.features.size() == 2);
    CHECK(table.features[0] == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(table.labels == std::vector<int>{1, 0});

    write_text(path, "a,b,c,label\n0.1,0.2,0.3,1\n");
    const RawTable with_header = load_csv(path, true);
    CHECK(with_header.features.size() == 1);

    write_text(path, "");
    CHECK_THROWS_AS(load_csv(path), std::runtime_error);

    write_text(path, "0.1,0.2,0.3,2\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("labels must be 0 or 1"),
                         std::runtime_error);

    write_text(path, "0.1,oops,0.3,1\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("row 1, column 2"),
                         std::runtime_error);

    write_text(path, "0.1,0.2,0.3,1\n0.1,0.2,1\n");
    CHECK_THROWS_AS(load_csv(path), std::runtime_error);

    CHECK_THROWS_AS(load_csv(temp_path("pf_no_such_file.csv")), std::runtime_error);
}

TEST_CASE("pca projection preserves structure in an exact subspace") {
    // Data spanning a 3-dim subspace of a 10-dim space: distances survive.
    Rng rng(1);
    std::vector<std::vector<double>> basis(3, std::vector<double>(10));
    for (auto& v : basis)
        for (double& x : v) x = rng.gaussian();

    std::vector<std::vector<double>> features;
    std::vector<std::vector<double>> latent;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> z = {rng.gaussian(), 0.5 * rng.gaussian(), 0.25 * rng.gaussian()};
        std::vector<double> x(10, 0.0);
        for (int c = 0; c < 3; ++c)
            for (int d = 0; d < 10; ++d) x[d] += z[c] * basis[c][d];
        latent.push_back(std::move(z));
        features.push_back(std::move(x));
    }

    const auto projected = pca_project(features, 3);
    for (int i = 0; i < 10; ++i) {
        for (int j = i + 1; j < 10; ++j) {
            const double original = sq_distance(features[i], features[j]);
            const double reduced = sq_distance(projected[i], projected[j]);
            CHECK(std::abs(original - reduced) < 1e-9 * std::max(1.0, original));
        }
    }
}

TEST_CASE("pca with k = d is an orthogonal change of basis") {
    Rng rng(2);
    std::vector<std::vector<double>> features;
    for (int i = 0; i < 30; ++i) {
        features.push_back({2.0 * rng.gaussian(), rng.gaussian(), 0.3 * rng.gaussian()});
    }
    const auto projected = pca_project(features, 3);
    for (int i = 0; i < 12; ++i) {
        for (int j = i + 1; j < 12; ++j) {
            const double original = sq_distance(features[i], features[j]);
            const double rotated = sq_distance(projected[i], projected[j]);
            CHECK(std::abs(original - rotated) < 1e-9 * std::max(1.0, original));
        }
    }
}

TEST_CASE("pca orders components by variance and separates clusters") {
    Rng rng(3);
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        const int label = i % 2;
        const double center = label == 1 ? 8.0 : -8.0;
        features.push_back({center + 0.2 * rng.gaussian(), rng.gaussian(), 0.5 * rng.gaussian(),
                            0.1 * rng.gaussian()});
        labels.push_back(label);
    }
    const Dataset ds = pca_reduce(features, labels, 3);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            CHECK(ds.features[i][c] >= -pi - 1e-12);
            CHECK(ds.features[i][c] <= pi + 1e-12);
        }
        // The first component carries the cluster split.
        CHECK((ds.features[i][0] > 0) == (ds.labels[i] == 1));
    }
}

TEST_CASE("pca rejects rank-deficient input") {
    std::vector<std::vector<double>> flat;
    std::vector<int> labels;
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        flat.push_back({rng.gaussian(), rng.gaussian(), 0.0});
        labels.push_back(i % 2);
    }
    CHECK_THROWS_AS(pca_reduce(flat, labels, 3), std::invalid_argument);

    std::vector<std::vector<double>> narrow(5, std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(pca_project(narrow, 3), std::invalid_argument);
}

TEST_CASE("pca is deterministic with the sign convention") {
    Rng rng(5);
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    for (int i = 0; i < 25; ++i) {
        features.push_back({rng.gaussian(), 2.0 * rng.gaussian(), rng.gaussian(),
                            0.5 * rng.gaussian()});
        labels.push_back(i % 2);
    }
    const Dataset a = pca_reduce(features, labels, 3);
    const Dataset b = pca_reduce(features, labels, 3);
    CHECK(a.features == b.features);
}

TEST_CASE("synth_circle labels by the radius rule") {
    const Dataset ds = synth_circle(500, 11);
    REQUIRE(ds.size() == 500);
    int inside = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double x1 = ds.features[i][0] / pi;
        const double x2 = ds.features[i][1] / pi;
        CHECK(ds.features[i][2] == 0.0);
        CHECK(std::abs(ds.features[i][0]) <= pi);
        CHECK(std::abs(ds.features[i][1]) <= pi);
        const int expected = x1 * x1 + x2 * x2 < 2.0 / pi ? 1 : 0;
        CHECK(ds.labels[i] == expected);
        inside += ds.labels[i];
    }
    // Balanced in expectation.
    CHECK(inside > 150);
    CHECK(inside < 350);

    const Dataset again = synth_circle(500, 11);
    CHECK(ds.features == again.features);
    CHECK_THROWS_AS(synth_circle(1, 0), std::invalid_argument);
}

TEST_CASE("split partitions deterministically and disjointly") {
    const Dataset ds = synth_circle(400, 13);
    const auto [train_set, test_set] = split(ds, 300, 100, 17);
    CHECK(train_set.size() == 300);
    CHECK(test_set.size() == 100);

    std::set<std::pair<double, double>> seen;
    for (const auto& f : train_set.features) seen.insert({f[0], f[1]});
    for (const auto& f : test_set.features) {
        CHECK(seen.find({f[0], f[1]}) == seen.end());
    }

    const auto [t2, e2] = split(ds, 300, 100, 17);
    CHECK(train_set.features == t2.features);
    CHECK(test_set.labels == e2.labels);

    CHECK_THROWS_AS(split(ds, 350, 100, 1), std::invalid_argument);
}

TEST_CASE("csv save/load roundtrip") {
    const Dataset ds = synth_circle(40, 19);
    const std::string path = temp_path("pf_ds_roundtrip.csv");
    save_csv(ds, path);
    const RawTable back = load_csv(path, true);
    REQUIRE(back.features.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.features[i][0] == doctest::Approx(ds.features[i][0]).epsilon(1e-15));
        CHECK(back.labels[i] == ds.labels[i]);
    }
}
