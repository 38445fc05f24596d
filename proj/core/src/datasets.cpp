#include "pulseforge/datasets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "pulseforge/rng.hpp"

namespace pulseforge {

namespace {

constexpr double pi = std::numbers::pi;

[[noreturn]] void parse_fail(std::size_t row, std::size_t col, const std::string& what) {
    std::ostringstream msg;
    msg << "csv parse error at row " << row << ", column " << col << ": " << what;
    throw std::runtime_error(msg.str());
}

}  // namespace

RawTable load_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv file: " + path);

    RawTable table;
    std::string line;
    std::size_t row = 0;
    std::size_t expected_cols = 0;
    while (std::getline(in, line)) {
        ++row;
        if (row == 1 && has_header) continue;
        if (line.empty()) continue;

        std::vector<double> values;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) parse_fail(row, col, "trailing characters in '" + cell + "'");
                values.push_back(v);
            } catch (const std::invalid_argument&) {
                parse_fail(row, col, "not a number: '" + cell + "'");
            } catch (const std::out_of_range&) {
                parse_fail(row, col, "value out of range: '" + cell + "'");
            }
        }
        if (values.size() < 2) parse_fail(row, values.size(), "need at least one feature and a label");
        if (expected_cols == 0) expected_cols = values.size();
        if (values.size() != expected_cols) parse_fail(row, values.size(), "inconsistent column count");

        const double raw_label = values.back();
        values.pop_back();
        const int label = static_cast<int>(std::lround(raw_label));
        if (std::abs(raw_label - label) > 1e-9 || (label != 0 && label != 1)) {
            parse_fail(row, expected_cols, "labels must be 0 or 1");
        }
        table.features.push_back(std::move(values));
        table.labels.push_back(label);
    }
    if (table.features.empty()) throw std::runtime_error("csv file is empty: " + path);
    return table;
}

std::vector<std::vector<double>> pca_project(const std::vector<std::vector<double>>& features,
                                             int k) {
    if (features.empty()) throw std::invalid_argument("pca_project: no samples");
    const auto n = static_cast<Eigen::Index>(features.size());
    const auto d = static_cast<Eigen::Index>(features.front().size());
    if (d < k) throw std::invalid_argument("pca_project: need at least k input dimensions");
    if (n < k + 1) throw std::invalid_argument("pca_project: need at least k+1 samples");

    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(features[i].size()) != d) {
            throw std::invalid_argument("pca_project: ragged feature rows");
        }
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = features[i][j];
    }
    x.rowwise() -= x.colwise().mean();

    const Eigen::MatrixXd cov = x.transpose() * x / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd evals = es.eigenvalues();  // ascending
    const double scale = std::max(evals.cwiseAbs().maxCoeff(), 1.0);
    if (evals(d - k) <= 1e-12 * scale) {
        throw std::invalid_argument("pca_project: input rank below k");
    }

    Eigen::MatrixXd basis(d, k);
    for (int c = 0; c < k; ++c) {
        Eigen::VectorXd v = es.eigenvectors().col(d - 1 - c);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        basis.col(c) = v;
    }
    const Eigen::MatrixXd projected = x * basis;

    std::vector<std::vector<double>> out(n, std::vector<double>(k));
    for (Eigen::Index i = 0; i < n; ++i)
        for (int c = 0; c < k; ++c) out[i][c] = projected(i, c);
    return out;
}

Dataset pca_reduce(const std::vector<std::vector<double>>& features,
                   const std::vector<int>& labels, int k) {
    if (features.empty() || features.size() != labels.size()) {
        throw std::invalid_argument("pca_reduce: features and labels must be non-empty and aligned");
    }
    if (k != 3) throw std::invalid_argument("pca_reduce: dataset features are three-dimensional");
    const auto projected = pca_project(features, k);

    Dataset out;
    out.labels = labels;
    out.features.resize(projected.size());
    const auto n = projected.size();
    for (int c = 0; c < k; ++c) {
        double lo = projected.front()[c];
        double hi = lo;
        for (const auto& row : projected) {
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            out.features[i][c] =
                span > 0.0 ? -pi + 2.0 * pi * (projected[i][c] - lo) / span : 0.0;
        }
    }
    return out;
}

Dataset synth_circle(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("synth_circle: need at least 2 samples");
    Rng rng(seed);
    Dataset ds;
    ds.features.reserve(n);
    ds.labels.reserve(n);
    const double r2 = 2.0 / pi;
    for (int i = 0; i < n; ++i) {
        const double x1 = rng.uniform(-1.0, 1.0);
        const double x2 = rng.uniform(-1.0, 1.0);
        ds.labels.push_back(x1 * x1 + x2 * x2 < r2 ? 1 : 0);
        ds.features.push_back({pi * x1, pi * x2, 0.0});
    }
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, int n_train, int n_test,
                                  std::uint64_t seed) {
    if (n_train < 0 || n_test < 0 ||
        static_cast<std::size_t>(n_train) + static_cast<std::size_t>(n_test) > ds.size()) {
        throw std::invalid_argument("split: n_train + n_test exceeds dataset size");
    }
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);

    const auto take = [&](int offset, int count) {
        Dataset part;
        part.features.reserve(count);
        part.labels.reserve(count);
        for (int i = 0; i < count; ++i) {
            part.features.push_back(ds.features[idx[offset + i]]);
            part.labels.push_back(ds.labels[idx[offset + i]]);
        }
        return part;
    };
    return {take(0, n_train), take(n_train, n_test)};
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write csv file: " + path);
    out << "x1,x2,x3,label\n";
    char buf[128];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", ds.features[i][0],
                      ds.features[i][1], ds.features[i][2], ds.labels[i]);
        out << buf;
    }
}

}  // namespace pulseforge
