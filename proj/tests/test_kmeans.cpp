#include "doctest.h"
#include "test_helpers.hpp"

#include "omvcdr/kmeans.hpp"
#include "oracle.hpp"

using namespace omvcdr;

TEST_CASE("two separated clouds match the brute-force optimum") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 0.3);
    for (int trial = 0; trial < 5; ++trial) {
        MatrixD x(2, 10);
        for (std::size_t i = 0; i < 10; ++i) {
            const double offset = i < 5 ? 0.0 : 20.0;
            x(0, i) = offset + g(rng);
            x(1, i) = g(rng);
        }
        const Partition p = kmeans_lloyd(x, 2, static_cast<std::uint64_t>(trial));
        std::vector<int> best;
        const double optimum = oracle::brute_force_kmeans_loss(x, 2, &best);
        CHECK(kmeans_loss(x, p) == doctest::Approx(optimum).epsilon(1e-12));
        for (std::size_t i = 1; i < 10; ++i)
            CHECK((p.labels[i] == p.labels[0]) == (i < 5));
    }
}

TEST_CASE("n == k puts every sample in its own cluster") {
    std::mt19937_64 rng(6);
    const MatrixD x = omvcdr::testing::random_matrix(3, 4, rng);
    const Partition p = kmeans_lloyd(x, 4, 1);
    CHECK(p.valid());
    CHECK(p.counts == std::vector<int>{1, 1, 1, 1});
    CHECK(kmeans_loss(x, p) == 0.0);
}

TEST_CASE("deterministic for fixed seed") {
    std::mt19937_64 rng(7);
    const MatrixD x = omvcdr::testing::random_matrix(4, 200, rng);
    CHECK(kmeans_lloyd(x, 5, 99) == kmeans_lloyd(x, 5, 99));
}

TEST_CASE("errors") {
    const MatrixD x(2, 3);
    CHECK_THROWS_AS(kmeans_lloyd(x, 4, 0), std::invalid_argument);
    // Every point identical: no seeding yields k distinct centres.
    CHECK_THROWS_AS(kmeans_lloyd(MatrixD(2, 10, 1.0), 3, 0), std::runtime_error);
}

TEST_CASE("Partition bookkeeping") {
    const Partition p = Partition::from_labels({0, 1, 1, 2}, 3);
    CHECK(p.counts == std::vector<int>{1, 2, 1});
    CHECK(p.valid());
    CHECK_FALSE(Partition::from_labels({0, 0, 2}, 3).valid());
    CHECK_THROWS_AS(Partition::from_labels({0, 3}, 3), std::invalid_argument);
}
