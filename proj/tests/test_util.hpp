#pragma once

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "dyncon/types.hpp"

namespace testutil {

/// Random symmetric positive definite matrix via A A^T + p I.
inline dyncon::Matrix random_spd(int p, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    dyncon::Matrix a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = gauss(rng);
    return a * a.transpose() + static_cast<double>(p) * dyncon::Matrix::Identity(p, p);
}

inline dyncon::Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    dyncon::Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    return m;
}

inline dyncon::SubjectSession random_session(int n, int p, std::mt19937_64& rng) {
    dyncon::SubjectSession s;
    s.subject_id = "subT";
    s.acquisition = "LR";
    s.data = random_matrix(n, p, rng);
    for (int j = 0; j < p; ++j) s.node_labels.push_back("node" + std::to_string(j));
    s.task_labels.assign(n, "rest");
    return s;
}

/// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; ++i) {
            path_ = base / (tag + "-" + std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(path_, ec)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
