#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pulseforge {

/// Labeled three-feature samples for binary classification. Features are
/// scaled to [-pi, pi] per component.
struct Dataset {
    std::vector<std::array<double, 3>> features;
    std::vector<int> labels;

    std::size_t size() const { return features.size(); }
};

struct RawTable {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
};

/// Comma-separated numeric columns with a final integer label column.
/// Rejects non-binary labels; parse failures report row and column.
RawTable load_csv(const std::string& path, bool has_header = false);

/// Mean-centered projection onto the top-k covariance eigenvectors
/// (descending eigenvalue, sign fixed so each component's largest-magnitude
/// loading is positive), before any range scaling.
std::vector<std::vector<double>> pca_project(const std::vector<std::vector<double>>& features,
                                             int k);

/// pca_project followed by per-component min-max scaling to [-pi, pi].
Dataset pca_reduce(const std::vector<std::vector<double>>& features,
                   const std::vector<int>& labels, int k = 3);

/// Planar two-class toy set: x1, x2 uniform in [-1, 1], x3 = 0, label 1 iff
/// x1^2 + x2^2 < 2/pi (balanced classes in expectation), scaled to [-pi, pi].
Dataset synth_circle(int n, std::uint64_t seed);

/// Seeded shuffle then disjoint partition into n_train + n_test samples.
std::pair<Dataset, Dataset> split(const Dataset& ds, int n_train, int n_test,
                                  std::uint64_t seed);

void save_csv(const Dataset& ds, const std::string& path);

}  // namespace pulseforge
