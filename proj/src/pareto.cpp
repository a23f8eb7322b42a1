#include "qmoo/pareto.hpp"

#include <algorithm>
#include <ostream>

namespace qmoo {

namespace {

bool strictly_below(const ObjectiveVector& p, const ObjectiveVector& ref) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] < ref[i])) return false;
    }
    return true;
}

double box_volume(const ObjectiveVector& p, const ObjectiveVector& ref) {
    double v = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) v *= ref[i] - p[i];
    return v;
}

// Keeps one representative per distinct non-dominated vector. Duplicates are
// irrelevant for volume, and shedding them early keeps the recursion small.
void prune_to_front(std::vector<ObjectiveVector>& pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<bool> dominated(pts.size(), false);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j != i && !dominated[j] && dominates(pts[j], pts[i])) {
                dominated[i] = true;
                break;
            }
        }
    }
    std::size_t kept = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!dominated[i]) {
            if (kept != i) pts[kept] = std::move(pts[i]);
            ++kept;
        }
    }
    pts.resize(kept);
}

// Points sorted ascending by first objective with strictly descending
// second objective (guaranteed after prune_to_front).
double sweep_2d(const std::vector<ObjectiveVector>& pts, const ObjectiveVector& ref) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double width = (i + 1 < pts.size() ? pts[i + 1][0] : ref[0]) - pts[i][0];
        total += width * (ref[1] - pts[i][1]);
    }
    return total;
}

// Assumes a cleaned set: mutually non-dominated, unique, strictly inside the
// reference box. Any processing order gives the exact union volume; sorting
// makes the limited sets collapse faster.
double hv_front(std::vector<ObjectiveVector> pts, const ObjectiveVector& ref) {
    if (pts.empty()) return 0.0;
    if (pts.size() == 1) return box_volume(pts[0], ref);
    if (ref.size() == 1) {
        double best = ref[0];
        for (const auto& p : pts) best = std::min(best, p[0]);
        return ref[0] - best;
    }
    if (ref.size() == 2) return sweep_2d(pts, ref);

    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        // Exclusive volume of pts[i] against the points after it.
        std::vector<ObjectiveVector> limited;
        limited.reserve(pts.size() - i - 1);
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            ObjectiveVector q(ref.size());
            for (std::size_t d = 0; d < ref.size(); ++d) q[d] = std::max(pts[j][d], pts[i][d]);
            limited.push_back(std::move(q));
        }
        prune_to_front(limited);
        total += box_volume(pts[i], ref) - hv_front(std::move(limited), ref);
    }
    return total;
}

double exclusive_volume(const ObjectiveVector& p, const std::vector<ParetoArchive::Entry>& entries,
                        const ObjectiveVector& ref) {
    std::vector<ObjectiveVector> limited;
    limited.reserve(entries.size());
    for (const auto& e : entries) {
        ObjectiveVector q(ref.size());
        for (std::size_t d = 0; d < ref.size(); ++d) q[d] = std::max(e.objectives[d], p[d]);
        if (strictly_below(q, ref)) limited.push_back(std::move(q));
    }
    prune_to_front(limited);
    std::sort(limited.begin(), limited.end());
    return box_volume(p, ref) - hv_front(std::move(limited), ref);
}

}  // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size()) throw InputError("objective vectors differ in length");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

std::vector<bool> non_dominated_mask(const std::vector<ObjectiveVector>& points) {
    std::vector<bool> mask(points.size(), true);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j != i && dominates(points[j], points[i])) {
                mask[i] = false;
                break;
            }
        }
    }
    return mask;
}

double hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& reference) {
    std::vector<ObjectiveVector> inside;
    inside.reserve(points.size());
    for (const auto& p : points) {
        if (p.size() != reference.size()) throw InputError("point dimension mismatch");
        if (strictly_below(p, reference)) inside.push_back(p);
    }
    if (inside.empty()) return 0.0;
    prune_to_front(inside);
    std::sort(inside.begin(), inside.end());
    return hv_front(std::move(inside), reference);
}

ObjectiveVector default_reference(int n_objectives) {
    return ObjectiveVector(static_cast<std::size_t>(n_objectives), 1.0 + 1e-9);
}

const ObjectiveVector* ParetoArchive::lookup(Bits bits) const {
    auto it = index_.find(bits);
    return it == index_.end() ? nullptr : &entries_[it->second].objectives;
}

bool ParetoArchive::insert(Bits bits, const ObjectiveVector& objectives) {
    if (index_.count(bits)) return false;
    for (const auto& e : entries_) {
        if (dominates(e.objectives, objectives)) return false;
    }

    if (!reference_.empty() && strictly_below(objectives, reference_)) {
        const double gain = exclusive_volume(objectives, entries_, reference_);
        hv_ += std::max(0.0, gain);
    }

    // Drop members the newcomer dominates; their boxes are subsets of its box,
    // so the tracked volume is unaffected.
    std::size_t kept = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!dominates(objectives, entries_[i].objectives)) {
            if (kept != i) entries_[kept] = std::move(entries_[i]);
            ++kept;
        }
    }
    if (kept != entries_.size()) {
        entries_.resize(kept);
        index_.clear();
        for (std::size_t i = 0; i < entries_.size(); ++i) index_[entries_[i].bits] = i;
    }
    index_[bits] = entries_.size();
    entries_.push_back({bits, objectives});
    return true;
}

int ParetoArchive::update(std::span<const Entry> candidates) {
    int inserted = 0;
    for (const auto& c : candidates) {
        if (insert(c.bits, c.objectives)) ++inserted;
    }
    return inserted;
}

double ParetoArchive::hypervolume_value() const {
    if (reference_.empty()) throw InputError("archive was built without a reference vector");
    return hv_;
}

void ParetoArchive::write_csv(std::ostream& out, int n_bits) const {
    write_front_csv(out, entries_, n_bits);
}

void write_front_csv(std::ostream& out, std::span<const ParetoArchive::Entry> entries,
                     int n_bits) {
    std::vector<const ParetoArchive::Entry*> order;
    order.reserve(entries.size());
    for (const auto& e : entries) order.push_back(&e);
    std::sort(order.begin(), order.end(),
              [](const auto* a, const auto* b) { return a->bits < b->bits; });

    out << "bitstring";
    const std::size_t m = entries.empty() ? 0 : entries[0].objectives.size();
    for (std::size_t k = 1; k <= m; ++k) out << ",f_" << k;
    out << '\n';
    for (const auto* e : order) {
        out << bits_to_string(e->bits, n_bits);
        for (double v : e->objectives) out << ',' << format_double(v);
        out << '\n';
    }
}

}  // namespace qmoo
