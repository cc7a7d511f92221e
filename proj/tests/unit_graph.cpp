#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "motifcrf/errors.hpp"
#include "motifcrf/graph.hpp"

using namespace motifcrf;

TEST_CASE("gaussian weights follow the decay formula") {
    const auto W = gaussian_block(6, 1.0, 0.0);
    for (int i = 0; i < 6; ++i) {
        CHECK(W(i, i) == 0.0);
        for (int j = 0; j < 6; ++j) {
            if (i == j) continue;
            const double d = static_cast<double>(i - j);
            CHECK(W(i, j) == std::exp(-d * d));   // sigma = 1, exact
        }
    }
    CHECK(W(0, 1) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
}

TEST_CASE("pruning zeroes negligible weights") {
    const auto W = gaussian_block(6, 1.0, 1e-5);
    CHECK(W(0, 4) == 0.0);                       // exp(-16) ~ 1.1e-7 < 1e-5
    CHECK(W(0, 3) == std::exp(-9.0));            // exp(-9) ~ 1.2e-4 survives
}

TEST_CASE("symmetric normalization") {
    // two instances: D = (w, w) so the normalized edge is exactly 1
    auto W = gaussian_block(2, 1.0, 1e-5);
    const auto A = normalize_block(W);
    CHECK(A(0, 1) == doctest::Approx(1.0));
    CHECK(A(1, 0) == doctest::Approx(1.0));
    CHECK(A(0, 0) == 0.0);

    // zero-sum rows stay zero
    const auto single = normalize_block(gaussian_block(1, 1.0, 1e-5));
    CHECK(single(0, 0) == 0.0);
}

TEST_CASE("adjacency blocks are symmetric and block-diagonal") {
    const BlockDiagonal A = build_adjacency({3, 1, 4}, GraphConfig{});
    CHECK(A.n == 8);
    for (const auto& b : A.blocks)
        CHECK((b.W - b.W.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // cross-segment entries are zero
    CHECK(A.entry(0, 3) == 0.0);
    CHECK(A.entry(2, 4) == 0.0);
    CHECK(A.entry(3, 3) == 0.0);   // singleton block is all zero

    const auto seg = A.segment_of();
    CHECK(seg == std::vector<int>{0, 0, 0, 1, 2, 2, 2, 2});
}

TEST_CASE("block multiply matches the dense product") {
    const BlockDiagonal A = build_adjacency({3, 2, 5}, GraphConfig{});
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(A.n, A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) dense(i, j) = A.entry(i, j);

    Eigen::MatrixXd Y(A.n, 3);
    for (int i = 0; i < A.n; ++i)
        for (int c = 0; c < 3; ++c) Y(i, c) = std::sin(i * 3.7 + c);

    const Eigen::MatrixXd S = A.times(Y);
    CHECK((S - dense * Y).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dimension mismatch is rejected") {
    const BlockDiagonal A = build_adjacency({3}, GraphConfig{});
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(5, 2);
    CHECK_THROWS_AS(A.times(Y), DimensionMismatch);
}
