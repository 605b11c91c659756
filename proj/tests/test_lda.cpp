#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dyncon/lda.hpp"
#include "test_util.hpp"

using dyncon::ContrastSpec;
using dyncon::Matrix;
using dyncon::Vector;

namespace {

/// Two-class rows where only the first `k_informative` columns separate the
/// classes (mean gap `gap`), the rest are pure noise.
std::pair<Matrix, std::vector<int>> two_class_rows(int n_per_class, int n_cols, int k_informative,
                                                   double gap, std::mt19937_64& rng) {
    Matrix rows = testutil::random_matrix(2 * n_per_class, n_cols, rng);
    std::vector<int> labels;
    for (int i = 0; i < 2 * n_per_class; ++i) {
        int y = i < n_per_class ? 1 : -1;
        labels.push_back(y);
        for (int j = 0; j < k_informative; ++j) rows(i, j) += y * gap / 2.0;
    }
    return {rows, labels};
}

}  // namespace

TEST_CASE("the lambda grid spans down from the null threshold") {
    std::mt19937_64 rng(193);
    auto [rows, labels] = two_class_rows(20, 6, 2, 2.0, rng);
    auto grid = dyncon::make_lambda_grid(rows, labels, 8, 0.01);
    REQUIRE(grid.size() == 8);
    for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    CHECK(grid.front() == doctest::Approx(0.01 * grid.back()).epsilon(1e-10));

    // at the top of the grid the lasso selects nothing
    auto selected = dyncon::sparse_lda_subject(rows, labels, {grid.back()}, 3);
    CHECK(selected.empty());
}

TEST_CASE("sparse_lda_subject finds informative columns across seeds") {
    int hits = 0, total = 0;
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        auto [rows, labels] = two_class_rows(30, 10, 3, 2.5, rng);
        auto grid = dyncon::make_lambda_grid(rows, labels);
        auto selected = dyncon::sparse_lda_subject(rows, labels, grid, 5);
        for (int j = 0; j < 3; ++j) {
            ++total;
            if (std::find(selected.begin(), selected.end(), j) != selected.end()) ++hits;
        }
    }
    CHECK(double(hits) / total >= 0.95);
}

TEST_CASE("stability_screen keeps the inclusive boundary and is monotone in tau") {
    std::vector<std::vector<int>> sets = {{0, 1}, {0, 2}, {0, 1}, {0, 3}, {0, 1}};
    auto screen = dyncon::stability_screen(sets, 5, 0.6);
    CHECK(screen.selection_frequency[0] == doctest::Approx(1.0));
    CHECK(screen.selection_frequency[1] == doctest::Approx(0.6));
    // frequency exactly tau is kept
    CHECK(screen.selected_edges == std::vector<int>{0, 1});
    CHECK(screen.p_prime == 2);

    std::mt19937_64 rng(197);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::vector<int>> random_sets(6);
        for (auto& s : random_sets)
            for (int e = 0; e < 12; ++e)
                if (rng() % 3 == 0) s.push_back(e);
        std::vector<int> prev;
        bool first = true;
        for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
            auto sc = dyncon::stability_screen(random_sets, 12, tau);
            if (!first)
                for (int e : sc.selected_edges)
                    CHECK(std::find(prev.begin(), prev.end(), e) != prev.end());
            prev = sc.selected_edges;
            first = false;
        }
    }
}

TEST_CASE("fit_lda matches the closed-form pooled discriminant") {
    std::mt19937_64 rng(199);
    auto [rows, labels] = two_class_rows(25, 4, 4, 1.5, rng);
    std::vector<int> all_edges{0, 1, 2, 3};
    ContrastSpec contrast{"pos", "neg"};
    const double gamma = 0.2;
    auto model = dyncon::fit_lda(rows, labels, all_edges, contrast, gamma);

    // reproduce the training standardization (population-sd divisor)
    Matrix xs = rows;
    const long m = rows.rows();
    for (int j = 0; j < 4; ++j) {
        double mean = rows.col(j).mean();
        double sd = std::sqrt((rows.col(j).array() - mean).square().sum() / m);
        xs.col(j) = (rows.col(j).array() - mean) / sd;
    }

    Vector mu_pos = Vector::Zero(4), mu_neg = Vector::Zero(4);
    int n_pos = 0, n_neg = 0;
    for (int i = 0; i < xs.rows(); ++i) {
        if (labels[i] > 0) {
            mu_pos += xs.row(i).transpose();
            ++n_pos;
        } else {
            mu_neg += xs.row(i).transpose();
            ++n_neg;
        }
    }
    mu_pos /= n_pos;
    mu_neg /= n_neg;
    Matrix sw = Matrix::Zero(4, 4);
    for (int i = 0; i < xs.rows(); ++i) {
        Vector d = xs.row(i).transpose() - (labels[i] > 0 ? mu_pos : mu_neg);
        sw += d * d.transpose();
    }
    sw /= double(xs.rows() - 2);
    Matrix shrunk = (1.0 - gamma) * sw + gamma * Matrix(sw.diagonal().asDiagonal());
    Vector w = shrunk.ldlt().solve(mu_pos - mu_neg);
    w.normalize();
    CHECK((model.weights - w).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(model.intercept ==
          doctest::Approx(0.5 * (w.dot(mu_pos) + w.dot(mu_neg))).epsilon(1e-10));

    // scores separate the classes on training data
    Vector scores = dyncon::project_lda(model, rows);
    int correct = 0;
    for (int i = 0; i < rows.rows(); ++i)
        if ((scores[i] > 0) == (labels[i] > 0)) ++correct;
    CHECK(correct >= 45);
}

TEST_CASE("fit_lda direction is scale invariant at zero shrinkage") {
    std::mt19937_64 rng(211);
    auto [rows, labels] = two_class_rows(30, 3, 3, 2.0, rng);
    std::vector<int> edges{0, 1, 2};
    ContrastSpec contrast{"p", "n"};
    auto base = dyncon::fit_lda(rows, labels, edges, contrast, 0.0);
    auto scaled = dyncon::fit_lda(Matrix(rows * 7.5), labels, edges, contrast, 0.0);
    double same = (base.weights - scaled.weights).cwiseAbs().maxCoeff();
    double flipped = (base.weights + scaled.weights).cwiseAbs().maxCoeff();
    CHECK(std::min(same, flipped) < 1e-6);
}

TEST_CASE("singular pooled covariance demands shrinkage") {
    std::mt19937_64 rng(223);
    Matrix rows(4, 6);  // more columns than rows: S_w is singular
    rows = testutil::random_matrix(4, 6, rng);
    std::vector<int> labels{1, 1, -1, -1};
    std::vector<int> edges{0, 1, 2, 3, 4, 5};
    CHECK_THROWS_WITH_AS(dyncon::fit_lda(rows, labels, edges, {"p", "n"}, 0.0),
                         doctest::Contains("shrinkage"), std::invalid_argument);
    CHECK_NOTHROW(dyncon::fit_lda(rows, labels, edges, {"p", "n"}, 0.5));
}

TEST_CASE("swapping contrast labels negates trajectories, accuracy unchanged") {
    std::mt19937_64 rng(227);
    auto [rows, labels] = two_class_rows(20, 5, 2, 2.0, rng);
    std::vector<int> edges{0, 1};
    auto swapped_labels = labels;
    for (auto& y : swapped_labels) y = -y;

    auto model = dyncon::fit_lda(rows, labels, edges, {"taskA", "taskB"}, 0.1);
    auto swapped = dyncon::fit_lda(rows, swapped_labels, edges, {"taskB", "taskA"}, 0.1);
    Vector a = dyncon::project_lda(model, rows);
    Vector b = dyncon::project_lda(swapped, rows);
    CHECK((a + b).cwiseAbs().maxCoeff() < 1e-10);

    std::vector<std::string> tasks;
    for (int y : labels) tasks.push_back(y > 0 ? "taskA" : "taskB");
    auto rep = dyncon::evaluate_heldout(model, {rows}, {tasks}, {"taskA", "taskB"});
    auto rep_sw = dyncon::evaluate_heldout(swapped, {rows}, {tasks}, {"taskB", "taskA"});
    CHECK(rep.accuracy == doctest::Approx(rep_sw.accuracy));
    CHECK(rep.task_correlation == doctest::Approx(rep_sw.task_correlation).epsilon(1e-10));
    CHECK((rep.mean_trajectory + rep_sw.mean_trajectory).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("evaluate_heldout scores a hand-built fixture") {
    dyncon::LdaModel model;
    model.weights = Vector::Ones(1);
    model.intercept = 0.0;
    model.selected_edges = {0};
    model.feature_means = Vector::Zero(1);
    model.feature_sds = Vector::Ones(1);
    model.contrast = {"A", "B"};

    Matrix session(4, 1);
    session << 2.0, -1.0, 3.0, -2.0;
    std::vector<std::string> tasks{"A", "B", "A", "B"};
    auto rep = dyncon::evaluate_heldout(model, {session}, {tasks}, {"A", "B"});
    CHECK(rep.accuracy == doctest::Approx(1.0));
    CHECK(rep.n_contrast_points == 4);
    CHECK(rep.task_correlation > 0.9);
    CHECK(rep.mean_trajectory.size() == 4);

    // rest rows are excluded from the accuracy denominator
    std::vector<std::string> with_rest{"A", "rest", "B", "B"};
    auto rep2 = dyncon::evaluate_heldout(model, {session}, {with_rest}, {"A", "B"});
    CHECK(rep2.n_contrast_points == 3);
    CHECK(rep2.accuracy == doctest::Approx(2.0 / 3.0));  // row 2 scores positive but is B
}

TEST_CASE("contrast_rows_by_subject groups and filters correctly") {
    dyncon::StackedLaplacians s;
    s.edge_index = dyncon::EdgeIndex(3);
    s.matrix = Matrix::Zero(8, 3);
    for (int r = 0; r < 8; ++r) s.matrix(r, 0) = r;
    s.node_labels = {"a", "b", "c"};
    s.row_meta = {
        {"s1", "LR", 0, "taskA"}, {"s1", "LR", 1, "rest"},  {"s1", "LR", 2, "taskB"},
        {"s1", "RL", 0, "taskA"}, {"s2", "LR", 0, "taskB"}, {"s2", "LR", 1, "taskA"},
        {"s2", "RL", 0, "taskB"}, {"s1", "LR", 3, "taskA"},
    };
    auto rows = dyncon::contrast_rows_by_subject(s, {"taskA", "taskB"}, "LR");
    REQUIRE(rows.subject_ids == std::vector<std::string>{"s1", "s2"});
    CHECK(rows.rows[0].rows() == 3);  // rows 0, 2, 7 (rest and RL excluded)
    CHECK(rows.labels[0] == std::vector<int>{1, -1, 1});
    CHECK(rows.rows[1].rows() == 2);
    CHECK(rows.labels[1] == std::vector<int>{-1, 1});
    CHECK(rows.rows[0](0, 0) == 0.0);
    CHECK(rows.rows[0](2, 0) == 7.0);
}

TEST_CASE("lda_network reports one signed weight per selected edge") {
    dyncon::LdaModel model;
    model.weights = Vector(2);
    model.weights << 0.3, -0.9;
    model.selected_edges = {1, 4};
    dyncon::EdgeIndex idx(4);
    auto net = dyncon::lda_network(model, idx);
    REQUIRE(net.size() == 2);
    CHECK(net[0].rank == 1);
    CHECK(net[0].weight == -0.9);
    auto [j, k] = idx.pair(4);
    CHECK(net[0].j == j);
    CHECK(net[0].k == k);
}
