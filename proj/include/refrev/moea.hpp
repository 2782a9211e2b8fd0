#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace refrev {

/// Objective vector, all components maximized. Only the first `dims`
/// components take part in comparisons, so two-objective runs reuse the same
/// machinery.
using Point = std::array<double, 3>;

/// a >= b in every component and a > b in at least one.
bool dominates(const Point& a, const Point& b, std::size_t dims = 3);

/// Deb's fast non-dominated sort. Front 0 is the non-dominated set; indices
/// inside a front are ascending.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Point> points, std::size_t dims = 3);

/// Crowding distance of each member of `front` (same order). Boundary members
/// of every objective with nonzero range are infinite; fronts of at most two
/// members are all infinite.
std::vector<double> crowding_distance(std::span<const Point> points, std::span<const std::size_t> front,
                                      std::size_t dims = 3);

/// Indices of points not dominated by any other point, ascending.
std::vector<std::size_t> nondominated_indices(std::span<const Point> points, std::size_t dims = 3);

/// Exact three-dimensional hypervolume dominated by `points` and bounded below
/// by `reference`. Points that do not strictly exceed the reference in every
/// component contribute nothing.
double hypervolume(std::span<const Point> points, const Point& reference);

} // namespace refrev
