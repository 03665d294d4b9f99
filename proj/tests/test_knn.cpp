#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "flowids/knn.hpp"
#include "support.hpp"

using namespace flowids;
using num::Matrix;

namespace {

// All-pairs reference: full sort by (distance, index).
Vote brute_force(const Matrix& samples, const std::vector<Vote>& targets, int k, const Eigen::RowVectorXd& q) {
    std::vector<std::pair<double, std::size_t>> d;
    for (Eigen::Index i = 0; i < samples.rows(); ++i)
        d.emplace_back((samples.row(i) - q).norm(), static_cast<std::size_t>(i));
    std::sort(d.begin(), d.end());
    int balance = 0;
    for (int i = 0; i < k; ++i) balance += static_cast<int>(to_target(targets[d[static_cast<std::size_t>(i)].second]));
    return balance > 0 ? Vote::positive : Vote::negative;
}

std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

TEST_CASE("knn hand example") {
    Matrix s(3, 2);
    s << 0, 0, 0, 1, 5, 5;
    const auto model = knn_train(s, {Vote::positive, Vote::positive, Vote::negative}, 3);
    const double q[] = {0, 0.4};
    const auto r = knn_classify(model, q);
    CHECK(r.vote == Vote::positive);
    CHECK(r.score == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("knn training preconditions") {
    Matrix one(1, 2);
    one << 0.3, 0.7;
    const auto m = knn_train(one, {Vote::negative}, 1);
    CHECK(knn_predict(m, std::span<const double>(one.data(), 2)) == Vote::negative);

    Matrix s = Matrix::Zero(5, 2);
    std::vector<Vote> y(5, Vote::positive);
    CHECK_THROWS_AS(knn_train(s, y, 4), ConfigError);
    CHECK_THROWS_AS(knn_train(s, y, 7), ConfigError);
    CHECK_THROWS_AS(knn_train(s, y, 0), ConfigError);
    CHECK_THROWS(knn_train(s, std::vector<Vote>(4, Vote::positive), 3));

    const auto ok = knn_train(s, y, 5);
    const double wrong[] = {1, 2, 3};
    CHECK_THROWS(knn_classify(ok, wrong));
}

TEST_CASE("knn equals brute force") {
    std::mt19937_64 gen(21);
    const Matrix samples = testing::random_matrix(gen, 200, 8, 0.0, 1.0);
    std::vector<Vote> targets;
    for (Eigen::Index i = 0; i < samples.rows(); ++i)
        targets.push_back(samples(i, 0) + samples(i, 3) > 1.0 ? Vote::positive : Vote::negative);
    const Matrix queries = testing::random_matrix(gen, 50, 8, 0.0, 1.0);

    for (int k : {1, 5, 65}) {
        const auto model = knn_train(samples, targets, k);
        const auto batch = knn_predict(model, queries);
        for (Eigen::Index q = 0; q < queries.rows(); ++q) {
            CAPTURE(k);
            CAPTURE(q);
            const Vote expect = brute_force(samples, targets, k, queries.row(q));
            CHECK(knn_predict(model, row_span(queries, q)) == expect);
            CHECK(batch[static_cast<std::size_t>(q)] == expect);
        }
    }
}

TEST_CASE("knn distance ties prefer the lower stored index") {
    // Two samples at the same distance from the query with opposite labels.
    Matrix s(3, 1);
    s << -1, 1, 10;
    const double q[] = {0};
    CHECK(knn_predict(knn_train(s, {Vote::positive, Vote::negative, Vote::negative}, 1), q) == Vote::positive);
    CHECK(knn_predict(knn_train(s, {Vote::negative, Vote::positive, Vote::negative}, 1), q) == Vote::negative);

    // Duplicate points, brute-force agreement on a coarse grid.
    std::mt19937_64 gen(4);
    std::uniform_int_distribution<int> cell(0, 3);
    Matrix grid(60, 2);
    std::vector<Vote> y;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        grid(i, 0) = cell(gen);
        grid(i, 1) = cell(gen);
        y.push_back(cell(gen) < 2 ? Vote::positive : Vote::negative);
    }
    for (int k : {1, 3, 9}) {
        const auto model = knn_train(grid, y, k);
        for (Eigen::Index i = 0; i < grid.rows(); ++i)
            CHECK(knn_predict(model, row_span(grid, i)) == brute_force(grid, y, k, grid.row(i)));
    }
}

TEST_CASE("knn ignores sample order when distances are distinct") {
    std::mt19937_64 gen(8);
    const Matrix samples = testing::random_matrix(gen, 80, 4);
    std::vector<Vote> y;
    for (Eigen::Index i = 0; i < samples.rows(); ++i) y.push_back(samples(i, 1) > 0 ? Vote::positive : Vote::negative);
    std::vector<Eigen::Index> perm(80);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    Matrix ps(80, 4);
    std::vector<Vote> py;
    for (Eigen::Index i = 0; i < 80; ++i) {
        ps.row(i) = samples.row(perm[static_cast<std::size_t>(i)]);
        py.push_back(y[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
    }
    const Matrix queries = testing::random_matrix(gen, 30, 4);
    CHECK(knn_predict(knn_train(samples, y, 7), queries) == knn_predict(knn_train(ps, py, 7), queries));
}

TEST_CASE("indexed search matches the linear scan on clustered data") {
    // Heavy duplication, as in real flow captures.
    std::mt19937_64 gen(30);
    std::uniform_int_distribution<int> pick(0, 9);
    const Matrix centres = testing::random_matrix(gen, 10, 8, 0.0, 1.0);
    const Matrix noise = testing::random_matrix(gen, 3000, 8, -0.01, 0.01);
    Matrix samples(3000, 8);
    std::vector<Vote> y;
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        const int c = pick(gen);
        samples.row(i) = centres.row(c);
        if (i % 3 == 0) samples.row(i) += noise.row(i);
        y.push_back(pick(gen) < 4 ? Vote::positive : Vote::negative);
    }
    const Matrix queries = testing::random_matrix(gen, 40, 8, 0.0, 1.0);
    for (int k : {1, 65, 301}) {
        const auto indexed = knn_train(samples, y, k);
        auto linear = indexed;
        linear.index.reset();
        for (Eigen::Index q = 0; q < 60; ++q) {
            const Eigen::RowVectorXd v = q < 40 ? Eigen::RowVectorXd(queries.row(q)) : Eigen::RowVectorXd(samples.row(q * 37));
            const std::span<const double> x(v.data(), 8);
            const auto a = knn_classify(indexed, x);
            CHECK(a.score == knn_classify(linear, x).score);
            CHECK(a.vote == brute_force(samples, y, k, v));
        }
    }
}
