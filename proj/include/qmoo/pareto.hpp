#pragma once

#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "qmoo/common.hpp"

namespace qmoo {

/// Strict Pareto dominance under minimization: a_i <= b_i everywhere and
/// a != b. Equal vectors do not dominate each other.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// mask[i] is true iff no other point dominates points[i]; identical
/// duplicates are all retained.
std::vector<bool> non_dominated_mask(const std::vector<ObjectiveVector>& points);

/// Exact hypervolume of the region dominated by `points` and bounded by
/// `reference` (minimization). Points that do not strictly dominate the
/// reference contribute nothing. Dimension sweep for M <= 2, WFG-style
/// recursive exclusive volumes above that.
double hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& reference);

/// Reference vector used for all landscape runs: objective values lie in
/// (0,1), so (1,...,1) plus a small margin strictly bounds every point.
ObjectiveVector default_reference(int n_objectives);

/// Unbounded store of mutually non-dominated (bitstring, objectives) pairs.
/// Deduplicates by bitstring; distinct bitstrings with equal objective
/// vectors are all kept. When constructed with a reference vector the
/// archive maintains its hypervolume incrementally, adding each accepted
/// point's exclusive contribution, so the value is non-decreasing by
/// construction.
class ParetoArchive {
  public:
    struct Entry {
        Bits bits = 0;
        ObjectiveVector objectives;
    };

    ParetoArchive() = default;
    explicit ParetoArchive(ObjectiveVector reference) : reference_(std::move(reference)) {}

    /// Offers one candidate; returns true if it entered the archive.
    bool insert(Bits bits, const ObjectiveVector& objectives);

    /// Offers candidates in order; returns how many entered.
    int update(std::span<const Entry> candidates);

    bool contains(Bits bits) const { return index_.count(bits) != 0; }
    const ObjectiveVector* lookup(Bits bits) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }
    const ObjectiveVector& reference() const { return reference_; }

    /// Incrementally tracked hypervolume; requires a reference vector.
    double hypervolume_value() const;

    /// CSV snapshot (bitstring, f_1..f_M), rows sorted by bitstring.
    void write_csv(std::ostream& out, int n_bits) const;

    using EntryList = std::vector<Entry>;

  private:
    ObjectiveVector reference_;
    std::vector<Entry> entries_;
    std::unordered_map<Bits, std::size_t> index_;
    double hv_ = 0.0;
};

/// Same CSV schema as ParetoArchive::write_csv for a free-standing entry list.
void write_front_csv(std::ostream& out, std::span<const ParetoArchive::Entry> entries, int n_bits);

}  // namespace qmoo
