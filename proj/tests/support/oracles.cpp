#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oracle {

bool dominates(const Vec3& a, const Vec3& b, std::size_t dims) {
    bool strictly = false;
    for (std::size_t k = 0; k < dims; ++k) {
        if (a[k] < b[k]) return false;
        if (a[k] > b[k]) strictly = true;
    }
    return strictly;
}

std::vector<std::vector<std::size_t>> peel_fronts(const std::vector<Vec3>& points, std::size_t dims) {
    std::vector<std::size_t> left(points.size());
    for (std::size_t i = 0; i < left.size(); ++i) left[i] = i;
    std::vector<std::vector<std::size_t>> fronts;
    while (!left.empty()) {
        std::vector<std::size_t> front, rest;
        for (auto i : left) {
            bool beaten = false;
            for (auto j : left) {
                if (dominates(points[j], points[i], dims)) beaten = true;
            }
            (beaten ? rest : front).push_back(i);
        }
        fronts.push_back(front);
        left = rest;
    }
    return fronts;
}

double hypervolume(const std::vector<Vec3>& points, const Vec3& ref) {
    std::vector<Vec3> kept;
    for (const auto& p : points) {
        if (p[0] > ref[0] && p[1] > ref[1] && p[2] > ref[2]) kept.push_back(p);
    }
    const std::size_t n = kept.size();
    double total = 0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        Vec3 corner = {INFINITY, INFINITY, INFINITY};
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1u)) continue;
            ++bits;
            for (int k = 0; k < 3; ++k) corner[k] = std::min(corner[k], kept[i][k]);
        }
        const double box = (corner[0] - ref[0]) * (corner[1] - ref[1]) * (corner[2] - ref[2]);
        total += bits % 2 == 1 ? box : -box;
    }
    return total;
}

double expertise(const std::string& dev, const std::string& file, const std::vector<Commit>& commits, int cap) {
    if (commits.empty()) return 0;
    std::int64_t first = commits[0].time, last = commits[0].time;
    for (const auto& c : commits) {
        first = std::min(first, c.time);
        last = std::max(last, c.time);
    }
    double sum = 0;
    int on_file = 0;
    for (const auto& c : commits) {
        if (std::find(c.files.begin(), c.files.end(), file) == c.files.end()) continue;
        ++on_file;
        if (c.author != dev) continue;
        sum += last == first ? 1.0 : double(c.time - first) / double(last - first);
    }
    if (on_file == 0) return 0;
    return std::min(1.0, sum / std::min(on_file, cap));
}

int workload(const std::string& dev, const std::vector<Activity>& activities, std::int64_t t0, std::int64_t t1) {
    std::set<std::pair<bool, std::string>> touched;
    for (const auto& a : activities) {
        for (const auto& [actor, t] : a.events) {
            if (actor == dev && t >= t0 && t <= t1) touched.insert({a.is_issue, a.id});
        }
    }
    return static_cast<int>(touched.size());
}

double group_score(const History& h, const std::vector<std::string>& members, const std::map<std::string, int>& loc,
                   std::size_t op_count) {
    for (const auto& d : members) {
        if (workload(d, h.activities, h.t0, h.t1) > h.cutoff) return -1;
    }
    double mass = 0;
    for (const auto& [f, count] : loc) {
        bool any = false;
        for (const auto& d : members) {
            const double e = expertise(d, f, h.commits, h.cap);
            any = any || e > 0;
            mass += count * e;
        }
        if (!any) return -1;
    }
    return mass / double(op_count);
}

Group best_group(const History& h, const std::map<std::string, int>& loc, std::size_t op_count,
                 std::size_t max_size) {
    Group best;
    if (op_count == 0 || loc.empty()) return best;
    std::set<std::string> names;
    for (const auto& c : h.commits) names.insert(c.author);
    for (const auto& a : h.activities) {
        for (const auto& e : a.events) names.insert(e.first);
    }
    // Developers with some expertise on the touched files.
    std::vector<std::string> pool;
    for (const auto& d : names) {
        bool any = false;
        for (const auto& [f, n] : loc) any = any || expertise(d, f, h.commits, h.cap) > 0;
        if (any) pool.push_back(d);
    }

    const std::size_t n = pool.size();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::string> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1u) members.push_back(pool[i]);
        }
        if (members.size() > max_size) continue;
        const double ra = group_score(h, members, loc, op_count);
        if (ra < 0) continue;
        const bool better = best.members.empty() || ra > best.ra + 1e-12 ||
                            (std::abs(ra - best.ra) <= 1e-12 &&
                             (members.size() < best.members.size() ||
                              (members.size() == best.members.size() && members < best.members)));
        if (better) best = {ra, members};
    }
    return best;
}

double cosine(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [t, x] : a) {
        na += x * x;
        if (auto it = b.find(t); it != b.end()) dot += x * it->second;
    }
    for (const auto& [t, y] : b) nb += y * y;
    if (na == 0 || nb == 0) return 0;
    return dot / std::sqrt(na * nb);
}

} // namespace oracle
