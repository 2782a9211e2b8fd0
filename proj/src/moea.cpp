#include "refrev/moea.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace refrev {

bool dominates(const Point& a, const Point& b, std::size_t dims) {
    bool strictly = false;
    for (std::size_t i = 0; i < dims; ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strictly = true;
    }
    return strictly;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Point> points, std::size_t dims) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> counter(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(points[p], points[q], dims)) {
                dominated[p].push_back(q);
                ++counter[q];
            } else if (dominates(points[q], points[p], dims)) {
                dominated[q].push_back(p);
                ++counter[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (counter[p] == 0) current.push_back(p);
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            for (auto q : dominated[p]) {
                if (--counter[q] == 0) next.push_back(q);
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const Point> points, std::span<const std::size_t> front,
                                      std::size_t dims) {
    const std::size_t n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (n <= 2) return std::vector<double>(n, inf);
    std::vector<double> distance(n, 0.0);
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < dims; ++m) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return points[front[a]][m] < points[front[b]][m]; });
        const double lo = points[front[order.front()]][m];
        const double hi = points[front[order.back()]][m];
        const double range = hi - lo;
        if (!(range > 0)) continue;
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            distance[order[i]] += (points[front[order[i + 1]]][m] - points[front[order[i - 1]]][m]) / range;
        }
    }
    return distance;
}

std::vector<std::size_t> nondominated_indices(std::span<const Point> points, std::size_t dims) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            dominated = j != i && dominates(points[j], points[i], dims);
        }
        if (!dominated) out.push_back(i);
    }
    return out;
}

namespace {

/// Area dominated in the first two coordinates, bounded below by (rx, ry).
double area2d(std::vector<std::pair<double, double>>& pts, double rx, double ry) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double area = 0;
    double best_y = ry;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        best_y = std::max(best_y, pts[i].second);
        const double next_x = i + 1 < pts.size() ? pts[i + 1].first : rx;
        area += (pts[i].first - next_x) * (best_y - ry);
    }
    return area;
}

} // namespace

double hypervolume(std::span<const Point> points, const Point& reference) {
    std::vector<Point> kept;
    for (const auto& p : points) {
        if (p[0] > reference[0] && p[1] > reference[1] && p[2] > reference[2]) kept.push_back(p);
    }
    if (kept.empty()) return 0.0;
    std::sort(kept.begin(), kept.end(), [](const Point& a, const Point& b) { return a[2] > b[2]; });
    double volume = 0;
    std::vector<std::pair<double, double>> slice;
    std::size_t i = 0;
    while (i < kept.size()) {
        const double z = kept[i][2];
        while (i < kept.size() && kept[i][2] == z) {
            slice.emplace_back(kept[i][0], kept[i][1]);
            ++i;
        }
        const double next_z = i < kept.size() ? kept[i][2] : reference[2];
        volume += area2d(slice, reference[0], reference[1]) * (z - next_z);
    }
    return volume;
}

} // namespace refrev
