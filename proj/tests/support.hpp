#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "flowids/numkernels.hpp"
#include "flowids/synthetic.hpp"
#include "flowids/taxonomy.hpp"

namespace testing {

using flowids::num::Matrix;

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                            double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(gen);
    return m;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline flowids::Taxonomy shipped_taxonomy() { return flowids::Taxonomy::load(FLOWIDS_TEST_TAXONOMY); }

/// Fresh empty directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::path(FLOWIDS_TEST_SCRATCH) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_flows(const std::filesystem::path& path, const std::vector<flowids::FlowRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& r : records) out << flowids::format_nslkdd(r) << '\n';
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
