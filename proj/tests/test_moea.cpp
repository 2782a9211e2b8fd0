#include <doctest.h>

#include <cmath>
#include <limits>

#include <refrev/moea.hpp>
#include <refrev/random.hpp>

#include "oracles.hpp"

using namespace refrev;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<Point> random_points(Rng& rng, std::size_t n, int grid) {
    std::vector<Point> out(n);
    for (auto& p : out) {
        // A coarse grid produces ties and duplicates.
        for (auto& x : p) x = static_cast<double>(rng.index(static_cast<std::uint64_t>(grid))) / grid;
    }
    return out;
}

std::vector<oracle::Vec3> as_vec(const std::vector<Point>& points) { return {points.begin(), points.end()}; }

} // namespace

TEST_SUITE("moea") {

TEST_CASE("dominance is strict and componentwise") {
    CHECK(dominates({1, 1, 1}, {1, 1, 0}));
    CHECK_FALSE(dominates({1, 0, 1}, {0, 1, 1}));
    CHECK_FALSE(dominates({0, 1, 1}, {1, 0, 1}));
    CHECK_FALSE(dominates({1, 1, 1}, {1, 1, 1}));
    // With two objectives the third component is ignored.
    CHECK_FALSE(dominates({1, 1, 0}, {1, 1, 5}, 3));
    CHECK_FALSE(dominates({1, 1, 0}, {1, 1, 5}, 2));
    CHECK(dominates({2, 1, 0}, {1, 1, 5}, 2));
}

TEST_CASE("small sorts") {
    std::vector<Point> one = {{0.3, 0.1, 0.2}};
    CHECK(fast_nondominated_sort(one) == std::vector<std::vector<std::size_t>>{{0}});

    std::vector<Point> chain = {{1, 1, 1}, {3, 3, 3}, {2, 2, 2}};
    CHECK(fast_nondominated_sort(chain) == std::vector<std::vector<std::size_t>>{{1}, {2}, {0}});
    CHECK(fast_nondominated_sort(std::vector<Point>{}).empty());
}

TEST_CASE("sorting matches repeated extraction") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t dims = trial % 2 == 0 ? 3 : 2;
        auto points = random_points(rng, 1 + rng.index(150), trial % 3 == 0 ? 5 : 1000);
        auto fronts = fast_nondominated_sort(points, dims);
        CHECK(fronts == oracle::peel_fronts(as_vec(points), dims));

        std::size_t total = 0;
        for (const auto& f : fronts) total += f.size();
        CHECK(total == points.size());
        CHECK(nondominated_indices(points, dims) == fronts.front());
    }
}

TEST_CASE("crowding distance") {
    std::vector<Point> pts = {{0, 0, 0}, {1, 0, 0}, {3, 0, 0}};
    std::vector<std::size_t> all = {0, 1, 2};
    std::vector<std::size_t> two = {0, 2};

    CHECK(crowding_distance(pts, two) == std::vector<double>{kInf, kInf});

    // Deb's formula: the middle point's neighbour gap over the full range.
    auto one_axis = crowding_distance(pts, all);
    CHECK(one_axis[0] == kInf);
    CHECK(one_axis[2] == kInf);
    CHECK(one_axis[1] == doctest::Approx(1.0));

    std::vector<Point> diagonal = {{0, 0, 5}, {1, 2, 5}, {3, 6, 5}};
    auto two_axes = crowding_distance(diagonal, all);
    CHECK(two_axes[1] == doctest::Approx(2.0));

    std::vector<Point> uneven = {{0, 10, 1}, {1, 8, 1}, {4, 4, 1}, {10, 0, 1}};
    std::vector<std::size_t> four = {0, 1, 2, 3};
    auto d = crowding_distance(uneven, four);
    CHECK(d[1] == doctest::Approx(4.0 / 10 + 6.0 / 10));
    CHECK(d[2] == doctest::Approx(9.0 / 10 + 8.0 / 10));

    std::vector<Point> same = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
    for (double x : crowding_distance(same, all)) CHECK_FALSE(std::isnan(x));
}

TEST_CASE("hypervolume matches inclusion-exclusion") {
    const Point ref = {-0.1, -0.1, -0.1};
    std::vector<Point> single = {{0.9, 0.4, 0.1}};
    CHECK(hypervolume(single, ref) == doctest::Approx(1.0 * 0.5 * 0.2));
    CHECK(hypervolume(std::vector<Point>{}, ref) == 0.0);
    std::vector<Point> below = {{-0.2, 1, 1}};
    CHECK(hypervolume(below, ref) == 0.0);

    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        auto points = random_points(rng, 1 + rng.index(12), trial % 2 == 0 ? 4 : 1000);
        for (auto& p : points) {
            for (auto& x : p) x -= 0.15;  // some fall below the reference
        }
        CHECK(hypervolume(points, ref) == doctest::Approx(oracle::hypervolume(as_vec(points), ref)).epsilon(1e-12));
    }
}

TEST_CASE("hypervolume ignores dominated points") {
    Rng rng(29);
    const Point ref = {0, 0, 0};
    for (int trial = 0; trial < 50; ++trial) {
        auto points = random_points(rng, 30, 50);
        std::vector<Point> front;
        for (auto i : nondominated_indices(points)) front.push_back(points[i]);
        CHECK(hypervolume(points, ref) == doctest::Approx(hypervolume(front, ref)).epsilon(1e-12));
    }
}

}
