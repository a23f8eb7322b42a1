#include "qmoo/evolutionary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qmoo/pareto.hpp"
#include "qmoo/rng.hpp"

namespace qmoo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Individual {
    Bits bits = 0;
    ObjectiveVector objectives;
    int rank = 0;
    double crowding = 0.0;  // NSGA-II tournament key
    int niche = 0;          // NSGA-III tournament key (direction occupancy)
};

Bits random_bits(Rng& rng, int n) {
    return rng.next() & ((Bits{1} << n) - 1);
}

// Uniform crossover; each bit position swaps between the children with
// probability 1/2.
std::pair<Bits, Bits> uniform_crossover(Rng& rng, Bits a, Bits b, int n) {
    const Bits mask = rng.next() & ((Bits{1} << n) - 1);
    return {(a & ~mask) | (b & mask), (b & ~mask) | (a & mask)};
}

Bits mutate(Rng& rng, Bits x, int n, double rate) {
    for (int i = 0; i < n; ++i) {
        if (rng.uniform() < rate) x ^= Bits{1} << i;
    }
    return x;
}

std::vector<ObjectiveVector> collect_objectives(const std::vector<Individual>& pop,
                                                const std::vector<int>& idx) {
    std::vector<ObjectiveVector> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(pop[i].objectives);
    return out;
}

// Perpendicular distance from point f to the ray through direction w.
double perpendicular_distance(const ObjectiveVector& f, const std::vector<double>& w) {
    double dot = 0.0, w2 = 0.0;
    for (std::size_t d = 0; d < f.size(); ++d) {
        dot += f[d] * w[d];
        w2 += w[d] * w[d];
    }
    const double scale = dot / w2;
    double dist2 = 0.0;
    for (std::size_t d = 0; d < f.size(); ++d) {
        const double delta = f[d] - scale * w[d];
        dist2 += delta * delta;
    }
    return std::sqrt(std::max(0.0, dist2));
}

class GaRunner {
  public:
    GaRunner(const RmnkLandscape& landscape, const GaConfig& config, ObjectiveVector reference,
             bool use_reference_directions)
        : landscape_(landscape),
          config_(config),
          nsga3_(use_reference_directions),
          reference_(reference.empty() ? default_reference(landscape.n_objectives())
                                       : std::move(reference)),
          archive_(reference_),
          rng_(derive_seed(config.seed, use_reference_directions ? "nsga3" : "nsga2")) {
        config_.validate();
        if (nsga3_) {
            directions_ = das_dennis(landscape.n_objectives(), config_.divisions_outer);
            if (config_.population_size == 0) {
                auto mu = directions_.size();
                config_.population_size = static_cast<int>((mu + 3) / 4 * 4);
            }
        }
        if (config_.population_size < 2 || config_.population_size % 2 != 0)
            throw ConfigError("population_size must be even and at least 2");
        if (config_.mutation_rate < 0.0) config_.mutation_rate = 1.0 / landscape.n_vars();
        trace_.algorithm = nsga3_ ? "nsga3" : "nsga2";
        trace_.instance_hash = landscape.content_hash();
        trace_.run_seed = config_.seed;
        trace_.n_vars = landscape.n_vars();
    }

    RunTrace run() {
        const int mu = config_.population_size;
        std::vector<Individual> pop;
        pop.reserve(mu);
        for (int i = 0; i < mu; ++i) pop.push_back(make_individual(random_bits(rng_, landscape_.n_vars())));
        assign_selection_keys(pop);
        record(0);

        long generation = 0;
        while (evaluations_ < config_.max_evaluations) {
            std::vector<Individual> offspring;
            offspring.reserve(mu);
            while (static_cast<int>(offspring.size()) < mu) {
                const Individual& pa = pop[tournament(pop)];
                const Individual& pb = pop[tournament(pop)];
                Bits ca = pa.bits, cb = pb.bits;
                if (rng_.uniform() < config_.crossover_probability) {
                    std::tie(ca, cb) = uniform_crossover(rng_, ca, cb, landscape_.n_vars());
                }
                ca = mutate(rng_, ca, landscape_.n_vars(), config_.mutation_rate);
                cb = mutate(rng_, cb, landscape_.n_vars(), config_.mutation_rate);
                offspring.push_back(make_individual(ca));
                if (static_cast<int>(offspring.size()) < mu) offspring.push_back(make_individual(cb));
            }
            pop = environmental_selection(std::move(pop), std::move(offspring));
            record(++generation);
        }

        trace_.total_evaluations = evaluations_;
        trace_.final_front = archive_.entries();
        std::sort(trace_.final_front.begin(), trace_.final_front.end(),
                  [](const auto& a, const auto& b) { return a.bits < b.bits; });
        return std::move(trace_);
    }

  private:
    Individual make_individual(Bits bits) {
        Individual ind;
        ind.bits = bits;
        ind.objectives = landscape_.evaluate(bits);
        ++evaluations_;
        archive_.insert(bits, ind.objectives);
        return ind;
    }

    void record(long generation) {
        const double hv = archive_.hypervolume_value();
        trace_.records.push_back({generation, evaluations_, hv, -hv, {}});
    }

    // Binary tournament: rank first, then crowding (II) or niche count (III);
    // full ties resolved uniformly at random from the run's stream.
    std::size_t tournament(const std::vector<Individual>& pop) {
        const auto a = static_cast<std::size_t>(rng_.uniform_below(pop.size()));
        const auto b = static_cast<std::size_t>(rng_.uniform_below(pop.size()));
        const Individual& ia = pop[a];
        const Individual& ib = pop[b];
        if (ia.rank != ib.rank) return ia.rank < ib.rank ? a : b;
        if (nsga3_) {
            if (ia.niche != ib.niche) return ia.niche < ib.niche ? a : b;
        } else {
            if (ia.crowding != ib.crowding) return ia.crowding > ib.crowding ? a : b;
        }
        return rng_.uniform_below(2) == 0 ? a : b;
    }

    std::vector<Individual> environmental_selection(std::vector<Individual> parents,
                                                    std::vector<Individual> offspring) {
        std::vector<Individual> combined = std::move(parents);
        combined.insert(combined.end(), std::make_move_iterator(offspring.begin()),
                        std::make_move_iterator(offspring.end()));
        std::vector<ObjectiveVector> objs;
        objs.reserve(combined.size());
        for (const auto& ind : combined) objs.push_back(ind.objectives);
        const auto fronts = fast_nondominated_sort(objs);

        const auto mu = static_cast<std::size_t>(config_.population_size);
        std::vector<Individual> next;
        next.reserve(mu);
        if (nsga3_) {
            select_nsga3(combined, fronts, mu, next);
        } else {
            select_nsga2(combined, fronts, mu, next);
        }
        return next;
    }

    void select_nsga2(std::vector<Individual>& combined,
                      const std::vector<std::vector<int>>& fronts, std::size_t mu,
                      std::vector<Individual>& next) {
        for (std::size_t f = 0; f < fronts.size() && next.size() < mu; ++f) {
            const auto& front = fronts[f];
            const auto dist = crowding_distance(collect_objectives(combined, front));
            std::vector<std::size_t> order(front.size());
            std::iota(order.begin(), order.end(), 0u);
            if (next.size() + front.size() > mu) {
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t x, std::size_t y) { return dist[x] > dist[y]; });
            }
            for (std::size_t pos : order) {
                if (next.size() == mu) break;
                Individual ind = std::move(combined[front[pos]]);
                ind.rank = static_cast<int>(f);
                ind.crowding = dist[pos];
                next.push_back(std::move(ind));
            }
        }
    }

    // Deb & Jain style niching: normalize with ideal point and ASF extreme
    // intercepts, associate by perpendicular distance (ties to the lower
    // direction index), fill the split front from the least-occupied
    // directions.
    void select_nsga3(std::vector<Individual>& combined,
                      const std::vector<std::vector<int>>& fronts, std::size_t mu,
                      std::vector<Individual>& next) {
        const std::size_t m = reference_.size();
        std::vector<int> considered;  // indices into combined, front by front
        std::size_t split = 0;        // first front that reaches or overflows mu
        for (;; ++split) {
            considered.insert(considered.end(), fronts[split].begin(), fronts[split].end());
            if (considered.size() >= mu) break;
        }

        // Normalization over the considered set.
        std::vector<double> ideal(m, kInf);
        for (int idx : considered) {
            for (std::size_t d = 0; d < m; ++d)
                ideal[d] = std::min(ideal[d], combined[idx].objectives[d]);
        }
        std::vector<double> intercept(m, 0.0);
        for (std::size_t axis = 0; axis < m; ++axis) {
            // Extreme point: minimal achievement scalarizing value along axis.
            double best = kInf;
            int best_idx = considered.front();
            for (int idx : considered) {
                double asf = 0.0;
                for (std::size_t d = 0; d < m; ++d) {
                    const double w = (d == axis) ? 1.0 : 1e-6;
                    asf = std::max(asf, (combined[idx].objectives[d] - ideal[d]) / w);
                }
                if (asf < best) {
                    best = asf;
                    best_idx = idx;
                }
            }
            intercept[axis] = combined[best_idx].objectives[axis] - ideal[axis];
        }
        for (std::size_t d = 0; d < m; ++d) {
            if (!(intercept[d] > 1e-12)) {
                double worst = 0.0;
                for (int idx : considered)
                    worst = std::max(worst, combined[idx].objectives[d] - ideal[d]);
                intercept[d] = std::max(worst, 1e-12);
            }
        }

        struct Assoc {
            int direction = 0;
            double distance = 0.0;
        };
        std::vector<Assoc> assoc(combined.size());
        for (int idx : considered) {
            ObjectiveVector norm(m);
            for (std::size_t d = 0; d < m; ++d)
                norm[d] = (combined[idx].objectives[d] - ideal[d]) / intercept[d];
            int best_dir = 0;
            double best_dist = kInf;
            for (std::size_t j = 0; j < directions_.size(); ++j) {
                const double dist = perpendicular_distance(norm, directions_[j]);
                if (dist < best_dist) {
                    best_dist = dist;
                    best_dir = static_cast<int>(j);
                }
            }
            assoc[idx] = {best_dir, best_dist};
        }

        std::vector<int> occupancy(directions_.size(), 0);
        auto push = [&](int idx, int rank) {
            Individual ind = std::move(combined[idx]);
            ind.rank = rank;
            ind.niche = assoc[idx].direction;  // direction id for now; count below
            next.push_back(std::move(ind));
            ++occupancy[assoc[idx].direction];
        };

        for (std::size_t f = 0; f < split; ++f) {
            for (int idx : fronts[f]) push(idx, static_cast<int>(f));
        }
        if (fronts[split].size() == mu - next.size()) {
            for (int idx : fronts[split]) push(idx, static_cast<int>(split));
        } else {
            std::vector<int> pool(fronts[split].begin(), fronts[split].end());
            while (next.size() < mu) {
                // Least-occupied direction that still has pool members,
                // ties to the lower index.
                int best_dir = -1;
                for (std::size_t j = 0; j < directions_.size(); ++j) {
                    const bool has_member =
                        std::any_of(pool.begin(), pool.end(), [&](int idx) {
                            return assoc[idx].direction == static_cast<int>(j);
                        });
                    if (!has_member) continue;
                    if (best_dir < 0 || occupancy[j] < occupancy[best_dir])
                        best_dir = static_cast<int>(j);
                }
                // An empty niche takes its closest member; an occupied one the
                // first member in pool order.
                int chosen = -1;
                for (int idx : pool) {
                    if (assoc[idx].direction != best_dir) continue;
                    if (occupancy[best_dir] != 0) {
                        chosen = idx;
                        break;
                    }
                    if (chosen < 0 || assoc[idx].distance < assoc[chosen].distance) chosen = idx;
                }
                push(chosen, static_cast<int>(split));
                std::erase(pool, chosen);
            }
        }
        // Replace stored direction ids with final occupancy counts.
        for (auto& ind : next) ind.niche = occupancy[static_cast<std::size_t>(ind.niche)];
    }

    void assign_selection_keys(std::vector<Individual>& pop) {
        std::vector<ObjectiveVector> objs;
        objs.reserve(pop.size());
        for (const auto& ind : pop) objs.push_back(ind.objectives);
        const auto fronts = fast_nondominated_sort(objs);
        for (std::size_t f = 0; f < fronts.size(); ++f) {
            const auto dist = crowding_distance(collect_objectives(pop, fronts[f]));
            for (std::size_t pos = 0; pos < fronts[f].size(); ++pos) {
                pop[fronts[f][pos]].rank = static_cast<int>(f);
                pop[fronts[f][pos]].crowding = dist[pos];
                pop[fronts[f][pos]].niche = 0;
            }
        }
    }

    const RmnkLandscape& landscape_;
    GaConfig config_;
    bool nsga3_;
    ObjectiveVector reference_;
    ParetoArchive archive_;
    Rng rng_;
    std::vector<std::vector<double>> directions_;
    long evaluations_ = 0;
    RunTrace trace_;
};

}  // namespace

void GaConfig::validate() const {
    if (population_size < 0) throw ConfigError("population_size must be non-negative");
    if (crossover_probability < 0.0 || crossover_probability > 1.0)
        throw ConfigError("crossover_probability must lie in [0,1]");
    if (mutation_rate > 1.0) throw ConfigError("mutation_rate must lie in [0,1]");
    if (divisions_outer < 1) throw ConfigError("divisions_outer must be positive");
    if (max_evaluations < 1) throw ConfigError("max_evaluations must be positive");
}

std::vector<std::vector<int>> fast_nondominated_sort(const std::vector<ObjectiveVector>& objectives) {
    const std::size_t n = objectives.size();
    if (n == 0) throw InputError("cannot sort an empty population");
    std::vector<std::vector<int>> dominated_by(n);
    std::vector<int> domination_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(objectives[i], objectives[j])) {
                dominated_by[i].push_back(static_cast<int>(j));
                ++domination_count[j];
            } else if (dominates(objectives[j], objectives[i])) {
                dominated_by[j].push_back(static_cast<int>(i));
                ++domination_count[i];
            }
        }
    }
    std::vector<std::vector<int>> fronts;
    std::vector<int> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (domination_count[i] == 0) current.push_back(static_cast<int>(i));
    }
    while (!current.empty()) {
        std::vector<int> following;
        for (int i : current) {
            for (int j : dominated_by[i]) {
                if (--domination_count[j] == 0) following.push_back(j);
            }
        }
        std::sort(following.begin(), following.end());
        fronts.push_back(std::move(current));
        current = std::move(following);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front) {
    const std::size_t n = front.size();
    if (n == 0) throw InputError("crowding distance of an empty front");
    std::vector<double> dist(n, 0.0);
    if (n <= 2) return std::vector<double>(n, kInf);
    const std::size_t m = front[0].size();
    std::vector<std::size_t> order(n);
    for (std::size_t d = 0; d < m; ++d) {
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][d] < front[b][d]; });
        const double range = front[order.back()][d] - front[order.front()][d];
        dist[order.front()] = kInf;
        dist[order.back()] = kInf;
        if (range <= 0.0) continue;
        for (std::size_t pos = 1; pos + 1 < n; ++pos) {
            if (dist[order[pos]] == kInf) continue;
            dist[order[pos]] += (front[order[pos + 1]][d] - front[order[pos - 1]][d]) / range;
        }
    }
    return dist;
}

std::vector<std::vector<double>> das_dennis(int n_objectives, int divisions) {
    if (n_objectives < 2) throw ConfigError("das_dennis requires at least two objectives");
    if (divisions < 1) throw ConfigError("das_dennis requires at least one division");
    std::vector<std::vector<double>> points;
    std::vector<int> parts(static_cast<std::size_t>(n_objectives), 0);
    const double scale = 1.0 / divisions;
    auto recurse = [&](auto&& self, int coord, int remaining) -> void {
        if (coord == n_objectives - 1) {
            parts[coord] = remaining;
            std::vector<double> point(parts.size());
            for (std::size_t d = 0; d < parts.size(); ++d) point[d] = parts[d] * scale;
            points.push_back(std::move(point));
            return;
        }
        for (int t = 0; t <= remaining; ++t) {
            parts[coord] = t;
            self(self, coord + 1, remaining - t);
        }
    };
    recurse(recurse, 0, divisions);
    return points;
}

RunTrace nsga2_run(const RmnkLandscape& landscape, const GaConfig& config,
                   ObjectiveVector reference) {
    return GaRunner(landscape, config, std::move(reference), false).run();
}

RunTrace nsga3_run(const RmnkLandscape& landscape, const GaConfig& config,
                   ObjectiveVector reference) {
    return GaRunner(landscape, config, std::move(reference), true).run();
}

}  // namespace qmoo
