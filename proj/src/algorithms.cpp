#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "refrev/errors.hpp"
#include "refrev/search.hpp"

namespace refrev {

namespace {

using Population = std::vector<Individual>;
using GenomeKey = std::vector<std::uint32_t>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxRejections = 50;

GenomeKey genome_key(const Solution& s) {
    GenomeKey key;
    key.reserve(s.genes.size() * 4);
    for (const auto& g : s.genes) {
        key.push_back(static_cast<std::uint32_t>(g.kind));
        if (g.kind == RefactoringKind::Null) {
            key.insert(key.end(), {0, 0, 0});
            continue;
        }
        key.push_back(g.source.value);
        key.push_back(g.target.value);
        key.push_back(g.member ? g.member->value + 1 : 0);
    }
    return key;
}

/// State shared by every algorithm: problem, budget, RNG and variation.
struct Context {
    const Problem& problem;
    const SearchConfig& config;
    Evaluator evaluator;
    Rng rng;
    std::size_t dims;

    Context(const Problem& p, const SearchConfig& c, std::size_t budget)
        : problem(p), config(c), evaluator(p, budget, c.threads), rng(c.seed), dims(objective_count(c.mode)) {}

    const GenomeSpace& space() const { return problem.genome_space(); }

    Population initial(std::size_t n) {
        Population pop(n);
        for (auto& ind : pop) ind.solution = random_solution(space(), config.max_sequence_length, rng);
        evaluator.evaluate(pop);
        return pop;
    }

    /// Crossover with probability pc, then mutation of both children.
    std::pair<Solution, Solution> vary(const Solution& a, const Solution& b) {
        auto children = rng.chance(config.crossover_probability) ? crossover(a, b, rng) : std::pair{a, b};
        children.first = mutate(children.first, space(), config.mutation_probability, rng);
        children.second = mutate(children.second, space(), config.mutation_probability, rng);
        return children;
    }

    /// Offspring bred from parents picked by `select`, evaluated, capped by
    /// the remaining budget. Children whose genes repeat a member of `known`
    /// or an earlier child are bred again, up to a fixed number of attempts.
    template <class Select>
    Population breed(std::size_t wanted, const Population& known, Select&& select) {
        const std::size_t n = std::min(wanted, evaluator.remaining());
        std::set<GenomeKey> seen;
        for (const auto& ind : known) seen.insert(genome_key(ind.solution));
        Population out;
        out.reserve(n);
        std::size_t rejected = 0;
        auto offer = [&](Solution&& s) {
            if (out.size() >= n) return;
            if (!seen.insert(genome_key(s)).second && rejected < kMaxRejections * n) {
                ++rejected;
                return;
            }
            out.push_back(Individual{std::move(s), {}, {}, {}, {}, {}});
        };
        while (out.size() < n) {
            const auto& p1 = select();
            const auto& p2 = select();
            auto [c1, c2] = vary(p1.solution, p2.solution);
            offer(std::move(c1));
            offer(std::move(c2));
        }
        evaluator.evaluate(out);
        return out;
    }

    std::vector<Point> points(std::span<const Individual> pop) const { return objective_points(pop, config.mode); }
};

struct RankCrowding {
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

RankCrowding rank_and_crowd(const std::vector<Point>& pts, std::size_t dims) {
    RankCrowding rc{std::vector<std::size_t>(pts.size()), std::vector<double>(pts.size())};
    const auto fronts = fast_nondominated_sort(pts, dims);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto d = crowding_distance(pts, fronts[r], dims);
        for (std::size_t i = 0; i < fronts[r].size(); ++i) {
            rc.rank[fronts[r][i]] = r;
            rc.crowding[fronts[r][i]] = d[i];
        }
    }
    return rc;
}

bool crowded_better(const RankCrowding& rc, std::size_t a, std::size_t b) {
    if (rc.rank[a] != rc.rank[b]) return rc.rank[a] < rc.rank[b];
    return rc.crowding[a] > rc.crowding[b];
}

/// Per-objective min-max normalization to [0, 1]; flat objectives map to 0.
std::vector<Point> normalized(const std::vector<Point>& pts, std::size_t dims) {
    std::vector<Point> out = pts;
    for (std::size_t m = 0; m < dims; ++m) {
        double lo = kInf, hi = -kInf;
        for (const auto& p : pts) {
            lo = std::min(lo, p[m]);
            hi = std::max(hi, p[m]);
        }
        const double range = hi - lo;
        for (auto& p : out) p[m] = range > 0 ? (p[m] - lo) / range : 0.0;
    }
    for (auto& p : out) {
        for (std::size_t m = dims; m < p.size(); ++m) p[m] = 0;
    }
    return out;
}

double distance(const Point& a, const Point& b, std::size_t dims) {
    double s = 0;
    for (std::size_t m = 0; m < dims; ++m) s += (a[m] - b[m]) * (a[m] - b[m]);
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------

/// Splits off every individual whose objective vector repeats an earlier one.
std::pair<Population, Population> split_clones(Population merged, const Context& ctx) {
    const auto pts = ctx.points(merged);
    std::set<Point> seen;
    Population distinct, clones;
    for (std::size_t i = 0; i < merged.size(); ++i)
        (seen.insert(pts[i]).second ? distinct : clones).push_back(std::move(merged[i]));
    return {std::move(distinct), std::move(clones)};
}

/// Elitist fill: whole fronts while they fit, then the least crowded members.
void fill_by_rank_and_crowding(Population& from, Population& into, std::size_t n, std::size_t dims, const Context& ctx) {
    const auto pts = ctx.points(from);
    for (const auto& front : fast_nondominated_sort(pts, dims)) {
        if (into.size() >= n) return;
        if (into.size() + front.size() <= n) {
            for (auto i : front) into.push_back(std::move(from[i]));
            continue;
        }
        const auto d = crowding_distance(pts, front, dims);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
        for (std::size_t k = 0; into.size() < n; ++k) into.push_back(std::move(from[front[order[k]]]));
        return;
    }
}

Population run_nsga2(Context& ctx) {
    const std::size_t n = ctx.config.population_size;
    Population pop = ctx.initial(n);
    auto rc = rank_and_crowd(ctx.points(pop), ctx.dims);
    while (ctx.evaluator.remaining() > 0) {
        auto tournament = [&]() -> const Individual& {
            const auto a = ctx.rng.index(pop.size());
            const auto b = ctx.rng.index(pop.size());
            if (crowded_better(rc, a, b)) return pop[a];
            if (crowded_better(rc, b, a)) return pop[b];
            return pop[ctx.rng.chance(0.5) ? a : b];
        };
        Population offspring = ctx.breed(n, pop, tournament);

        Population merged = std::move(pop);
        for (auto& o : offspring) merged.push_back(std::move(o));
        Population next;
        next.reserve(n);
        // Individuals repeating an earlier objective vector compete only for
        // the places the distinct ones leave free.
        auto [distinct, clones] = split_clones(std::move(merged), ctx);
        fill_by_rank_and_crowding(distinct, next, n, ctx.dims, ctx);
        fill_by_rank_and_crowding(clones, next, n, ctx.dims, ctx);
        pop = std::move(next);
        rc = rank_and_crowd(ctx.points(pop), ctx.dims);
    }
    return pop;
}

// ---------------------------------------------------------------------------

/// SPEA2 fitness: raw (sum of dominators' strengths) plus k-NN density.
std::vector<double> spea2_fitness(const std::vector<Point>& pts, const std::vector<Point>& norm, std::size_t dims,
                                  std::vector<std::vector<double>>& dist) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> strength(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (dominates(pts[i], pts[j], dims)) ++strength[i];
        }
    }
    dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = distance(norm[i], norm[j], dims);
    }
    const std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    std::vector<double> fitness(n, 0.0);
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        double raw = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (dominates(pts[j], pts[i], dims)) raw += static_cast<double>(strength[j]);
        }
        row.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) row.push_back(dist[i][j]);
        }
        double sigma_k = 0;
        if (!row.empty()) {
            const auto kk = std::min(k, row.size() - 1);
            std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk), row.end());
            sigma_k = row[kk];
        }
        fitness[i] = raw + 1.0 / (sigma_k + 2.0);
    }
    return fitness;
}

/// Environmental selection: all non-dominated members, truncated by iterated
/// nearest-neighbour removal or filled up with the best dominated ones.
Population spea2_select(Population& all, const Context& ctx, std::size_t size) {
    const auto pts = ctx.points(all);
    const auto norm = normalized(pts, ctx.dims);
    std::vector<std::vector<double>> dist;
    const auto fitness = spea2_fitness(pts, norm, ctx.dims, dist);

    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (fitness[i] < 1.0) chosen.push_back(i);
    }
    if (chosen.size() < size) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (fitness[i] >= 1.0) rest.push_back(i);
        }
        std::stable_sort(rest.begin(), rest.end(), [&](auto a, auto b) { return fitness[a] < fitness[b]; });
        for (std::size_t i = 0; chosen.size() < size && i < rest.size(); ++i) chosen.push_back(rest[i]);
        std::sort(chosen.begin(), chosen.end());
    } else if (chosen.size() > size) {
        // Sorted distance lists to the other survivors; drop the member whose
        // list is lexicographically smallest until the archive fits.
        std::vector<std::vector<double>> lists(chosen.size());
        for (std::size_t a = 0; a < chosen.size(); ++a) {
            for (std::size_t b = 0; b < chosen.size(); ++b) {
                if (a != b) lists[a].push_back(dist[chosen[a]][chosen[b]]);
            }
            std::sort(lists[a].begin(), lists[a].end());
        }
        std::vector<bool> alive(chosen.size(), true);
        std::size_t count = chosen.size();
        while (count > size) {
            std::size_t worst = chosen.size();
            for (std::size_t a = 0; a < chosen.size(); ++a) {
                if (!alive[a]) continue;
                if (worst == chosen.size() || lists[a] < lists[worst]) worst = a;
            }
            alive[worst] = false;
            --count;
            for (std::size_t a = 0; a < chosen.size(); ++a) {
                if (!alive[a]) continue;
                const double d = dist[chosen[a]][chosen[worst]];
                auto it = std::lower_bound(lists[a].begin(), lists[a].end(), d);
                lists[a].erase(it);
            }
        }
        std::vector<std::size_t> kept;
        for (std::size_t a = 0; a < chosen.size(); ++a) {
            if (alive[a]) kept.push_back(chosen[a]);
        }
        chosen = std::move(kept);
    }
    Population out;
    out.reserve(chosen.size());
    for (auto i : chosen) out.push_back(std::move(all[i]));
    return out;
}

Population run_spea2(Context& ctx) {
    const std::size_t n = ctx.config.population_size;
    Population pop = ctx.initial(n);
    Population archive;
    while (true) {
        Population all = std::move(archive);
        for (auto& p : pop) all.push_back(std::move(p));
        archive = spea2_select(all, ctx, n);
        if (ctx.evaluator.remaining() == 0) break;

        const auto pts = ctx.points(archive);
        const auto norm = normalized(pts, ctx.dims);
        std::vector<std::vector<double>> dist;
        const auto fitness = spea2_fitness(pts, norm, ctx.dims, dist);
        auto tournament = [&]() -> const Individual& {
            const auto a = ctx.rng.index(archive.size());
            const auto b = ctx.rng.index(archive.size());
            if (fitness[a] < fitness[b]) return archive[a];
            if (fitness[b] < fitness[a]) return archive[b];
            return archive[ctx.rng.chance(0.5) ? a : b];
        };
        pop = ctx.breed(n, archive, tournament);
    }
    return archive;
}

// ---------------------------------------------------------------------------

/// Additive epsilon indicator for maximization: the smallest shift that lets
/// `a` weakly dominate `b`.
double epsilon_indicator(const Point& a, const Point& b, std::size_t dims) {
    double eps = -kInf;
    for (std::size_t m = 0; m < dims; ++m) eps = std::max(eps, b[m] - a[m]);
    return eps;
}

Population ibea_select(Population pop, const Context& ctx, std::size_t size, std::vector<double>& fitness) {
    const auto norm = normalized(ctx.points(pop), ctx.dims);
    const std::size_t n = pop.size();
    std::vector<std::vector<double>> ind(n, std::vector<double>(n, 0.0));
    double c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            ind[i][j] = epsilon_indicator(norm[i], norm[j], ctx.dims);
            c = std::max(c, std::abs(ind[i][j]));
        }
    }
    if (!(c > 0)) c = 1;
    const double scale = c * ctx.config.ibea_kappa;
    fitness.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i != j) fitness[j] -= std::exp(-ind[i][j] / scale);
        }
    }
    std::vector<bool> alive(n, true);
    for (std::size_t count = n; count > size; --count) {
        std::size_t worst = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (alive[i] && (worst == n || fitness[i] < fitness[worst])) worst = i;
        }
        alive[worst] = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (alive[j]) fitness[j] += std::exp(-ind[worst][j] / scale);
        }
    }
    Population out;
    std::vector<double> kept_fitness;
    for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        out.push_back(std::move(pop[i]));
        kept_fitness.push_back(fitness[i]);
    }
    fitness = std::move(kept_fitness);
    return out;
}

Population run_ibea(Context& ctx) {
    const std::size_t n = ctx.config.population_size;
    Population pop = ctx.initial(n);
    std::vector<double> fitness;
    while (true) {
        pop = ibea_select(std::move(pop), ctx, n, fitness);
        if (ctx.evaluator.remaining() == 0) break;
        auto tournament = [&]() -> const Individual& {
            const auto a = ctx.rng.index(pop.size());
            const auto b = ctx.rng.index(pop.size());
            if (fitness[a] > fitness[b]) return pop[a];
            if (fitness[b] > fitness[a]) return pop[b];
            return pop[ctx.rng.chance(0.5) ? a : b];
        };
        Population offspring = ctx.breed(n, pop, tournament);
        for (auto& o : offspring) pop.push_back(std::move(o));
    }
    return pop;
}

// ---------------------------------------------------------------------------

/// Bounded non-dominated archive that evicts the most crowded member.
class CrowdingArchive {
public:
    CrowdingArchive(std::size_t capacity, std::size_t dims, ObjectiveMode mode)
        : capacity_(capacity), dims_(dims), mode_(mode) {}

    bool add(const Individual& ind) {
        const auto p = point(ind);
        for (const auto& q : pts_) {
            if (dominates(q, p, dims_) || q == p) return false;
        }
        for (std::size_t i = members_.size(); i-- > 0;) {
            if (dominates(p, pts_[i], dims_)) {
                members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(i));
                pts_.erase(pts_.begin() + static_cast<std::ptrdiff_t>(i));
            }
        }
        members_.push_back(ind);
        pts_.push_back(p);
        if (members_.size() > capacity_) {
            std::vector<std::size_t> all(members_.size());
            std::iota(all.begin(), all.end(), 0);
            const auto d = crowding_distance(pts_, all, dims_);
            const auto worst = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
            members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(worst));
            pts_.erase(pts_.begin() + static_cast<std::ptrdiff_t>(worst));
            return worst != members_.size();
        }
        return true;
    }

    const Population& members() const { return members_; }

private:
    Point point(const Individual& ind) const {
        auto p = ind.fitness.as_point();
        if (mode_ == ObjectiveMode::WithoutReview) p[2] = 0;
        return p;
    }

    std::size_t capacity_;
    std::size_t dims_;
    ObjectiveMode mode_;
    Population members_;
    std::vector<Point> pts_;
};

/// Grid shape with rows * cols == n, as square as possible.
std::pair<std::size_t, std::size_t> grid_shape(std::size_t n) {
    auto rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (rows > 1 && n % rows != 0) --rows;
    return {rows, n / rows};
}

std::vector<std::size_t> moore_neighbours(std::size_t cell, std::size_t rows, std::size_t cols) {
    const auto r = static_cast<long>(cell / cols), c = static_cast<long>(cell % cols);
    const auto R = static_cast<long>(rows), C = static_cast<long>(cols);
    std::vector<std::size_t> out;
    for (long dr = -1; dr <= 1; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const auto nr = ((r + dr) % R + R) % R;
            const auto nc = ((c + dc) % C + C) % C;
            out.push_back(static_cast<std::size_t>(nr * C + nc));
        }
    }
    return out;
}

const Individual& dominance_tournament(std::span<const Individual* const> pool, const Context& ctx, Rng& rng) {
    const auto& a = *pool[rng.index(pool.size())];
    const auto& b = *pool[rng.index(pool.size())];
    const auto pa = objective_points(std::span(&a, 1), ctx.config.mode)[0];
    const auto pb = objective_points(std::span(&b, 1), ctx.config.mode)[0];
    if (dominates(pa, pb, ctx.dims)) return a;
    if (dominates(pb, pa, ctx.dims)) return b;
    return rng.chance(0.5) ? a : b;
}

Population run_mocell(Context& ctx) {
    const std::size_t n = ctx.config.population_size;
    const auto [rows, cols] = grid_shape(n);
    Population grid = ctx.initial(n);
    CrowdingArchive archive(n, ctx.dims, ctx.config.mode);
    for (const auto& ind : grid) archive.add(ind);

    while (ctx.evaluator.remaining() > 0) {
        for (std::size_t cell = 0; cell < n && ctx.evaluator.remaining() > 0; ++cell) {
            const auto neigh = moore_neighbours(cell, rows, cols);
            std::vector<const Individual*> pool;
            for (auto i : neigh) pool.push_back(&grid[i]);
            const auto& p1 = dominance_tournament(pool, ctx, ctx.rng);
            std::vector<const Individual*> archive_pool;
            for (const auto& a : archive.members()) archive_pool.push_back(&a);
            const auto& p2 = archive_pool.empty() ? dominance_tournament(pool, ctx, ctx.rng)
                                                  : dominance_tournament(archive_pool, ctx, ctx.rng);
            auto child = ctx.evaluator.evaluate(ctx.vary(p1.solution, p2.solution).first);

            const auto pc = objective_points(std::span(&child, 1), ctx.config.mode)[0];
            const auto pcur = objective_points(std::span(&grid[cell], 1), ctx.config.mode)[0];
            if (dominates(pc, pcur, ctx.dims)) {
                grid[cell] = child;
            } else if (!dominates(pcur, pc, ctx.dims)) {
                // Non-dominated: the child displaces the worst of the
                // neighbourhood (by rank, then crowding) unless it is the worst.
                std::vector<std::size_t> cells = neigh;
                cells.push_back(cell);
                std::sort(cells.begin(), cells.end());
                cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
                std::vector<Point> pts;
                for (auto i : cells) pts.push_back(objective_points(std::span(&grid[i], 1), ctx.config.mode)[0]);
                pts.push_back(pc);
                const auto rc = rank_and_crowd(pts, ctx.dims);
                std::size_t worst = 0;
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    if (crowded_better(rc, worst, i)) worst = i;
                }
                if (worst != cells.size()) grid[cells[worst]] = child;
            }
            archive.add(child);
        }
        // Feedback: archive members re-enter the grid at random cells.
        const auto& members = archive.members();
        const std::size_t k = std::min({ctx.config.mocell_feedback, members.size(), n});
        std::vector<std::size_t> cells(n);
        std::iota(cells.begin(), cells.end(), 0);
        ctx.rng.shuffle(cells);
        for (std::size_t i = 0; i < k; ++i) grid[cells[i]] = members[ctx.rng.index(members.size())];
    }
    return archive.members();
}

// ---------------------------------------------------------------------------

Population run_random_search(Context& ctx) {
    Population archive;
    std::vector<Point> pts;
    const std::size_t batch = ctx.config.population_size;
    while (ctx.evaluator.remaining() > 0) {
        Population draws(std::min(batch, ctx.evaluator.remaining()));
        for (auto& d : draws) d.solution = random_solution(ctx.space(), ctx.config.max_sequence_length, ctx.rng);
        ctx.evaluator.evaluate(draws);
        for (auto& d : draws) {
            const auto p = objective_points(std::span(&d, 1), ctx.config.mode)[0];
            bool dominated = false;
            for (const auto& q : pts) {
                if (dominates(q, p, ctx.dims)) {
                    dominated = true;
                    break;
                }
            }
            if (dominated) continue;
            for (std::size_t i = archive.size(); i-- > 0;) {
                if (dominates(p, pts[i], ctx.dims)) {
                    archive.erase(archive.begin() + static_cast<std::ptrdiff_t>(i));
                    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
                }
            }
            bool duplicate = false;
            for (const auto& a : archive) {
                if (a.effective == d.effective) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;
            archive.push_back(std::move(d));
            pts.push_back(p);
        }
    }
    return archive;
}

} // namespace

ParetoFront run_search(const Problem& problem, const SearchConfig& config) {
    config.validate();
    const std::size_t budget = config.max_evaluations.value_or(default_max_evaluations(problem.internal_class_count()));
    if (budget < config.population_size) {
        throw ConfigError("maximum evaluations (" + std::to_string(budget) + ") must be at least the population size (" +
                          std::to_string(config.population_size) + ")");
    }
    Context ctx(problem, config, budget);
    Population result;
    switch (config.algorithm) {
    case Algorithm::Nsga2: result = run_nsga2(ctx); break;
    case Algorithm::Spea2: result = run_spea2(ctx); break;
    case Algorithm::Ibea: result = run_ibea(ctx); break;
    case Algorithm::MoCell: result = run_mocell(ctx); break;
    case Algorithm::RandomSearch: result = run_random_search(ctx); break;
    }
    ParetoFront front;
    front.solutions = final_front(std::move(result), config.mode);
    front.provenance = {std::string(to_string(config.algorithm)), config.seed, ctx.evaluator.used(), config.mode};
    return front;
}

} // namespace refrev
