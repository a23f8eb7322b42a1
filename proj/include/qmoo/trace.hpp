#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmoo/common.hpp"
#include "qmoo/pareto.hpp"

namespace qmoo {

struct IterationRecord {
    long iteration = 0;   // objective call (qmoo) or generation (GA), 1-based
    long fevals = 0;      // cumulative classical cost-function evaluations
    double hv = 0.0;      // best-so-far hypervolume (archive value when enabled)
    double objective = 0.0;  // value handed to the classical optimizer
    std::vector<double> params;  // variational parameters; empty for GA runs
};

struct RunTrace {
    std::string algorithm;
    std::uint64_t instance_hash = 0;
    std::uint64_t run_seed = 0;
    int n_vars = 0;
    long total_evaluations = 0;
    long cache_hits = 0;
    bool budget_exhausted = false;
    double hv_ideal = 0.0;  // 0 until a normalization pass fills it in
    std::vector<IterationRecord> records;
    std::vector<ParetoArchive::Entry> final_front;

    double final_hv() const { return records.empty() ? 0.0 : records.back().hv; }

    /// Columns iter,fevals,hv,hv_norm; hv_norm left empty while hv_ideal is
    /// unset. No wall-clock fields, so re-runs are byte-identical.
    void write_csv(std::ostream& out) const;
};

/// Reads rows written by RunTrace::write_csv (metadata lives in the JSON
/// sidecar, so only the numeric columns come back).
struct TraceRow {
    long iteration = 0;
    long fevals = 0;
    double hv = 0.0;
    double hv_norm = 0.0;
    bool has_norm = false;
};
std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace qmoo
