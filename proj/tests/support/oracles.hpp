#pragma once

// Slow, obviously-correct reference implementations used to cross-check the
// library. Nothing here calls into the code under test.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using Vec3 = std::array<double, 3>;

bool dominates(const Vec3& a, const Vec3& b, std::size_t dims);

/// Repeatedly peels off the non-dominated remainder. Indices ascending per front.
std::vector<std::vector<std::size_t>> peel_fronts(const std::vector<Vec3>& points, std::size_t dims);

/// Inclusion-exclusion over every subset of points; fine up to ~16 points.
double hypervolume(const std::vector<Vec3>& points, const Vec3& ref);

struct Commit {
    std::string author;
    std::int64_t time = 0;
    std::vector<std::string> files;
};

struct Activity {
    std::string id;
    bool is_issue = false;
    std::vector<std::pair<std::string, std::int64_t>> events;
};

double expertise(const std::string& dev, const std::string& file, const std::vector<Commit>& commits, int cap);
int workload(const std::string& dev, const std::vector<Activity>& activities, std::int64_t t0, std::int64_t t1);

struct Group {
    double ra = 0;
    std::vector<std::string> members;
};

struct History {
    std::vector<Commit> commits;
    std::vector<Activity> activities;
    int cap = 10;
    int cutoff = 2;
    std::int64_t t0 = 0, t1 = 0;
};

/// RA of one group, or -1 when a member is busy or the files are not covered.
double group_score(const History& h, const std::vector<std::string>& members, const std::map<std::string, int>& loc,
                   std::size_t op_count);

/// Every subset of up to `max_size` developers, scored from scratch.
Group best_group(const History& h, const std::map<std::string, int>& loc, std::size_t op_count,
                 std::size_t max_size);

double cosine(const std::map<std::string, int>& a, const std::map<std::string, int>& b);

} // namespace oracle
