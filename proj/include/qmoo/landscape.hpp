#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qmoo/common.hpp"

namespace qmoo {

struct RmnkConfig {
    int n_vars = 1;         // N
    int n_objectives = 1;   // M
    int epistasis = 0;      // K
    double rho = 0.0;       // pairwise objective correlation
    std::uint64_t seed = 0;

    // Throws ConfigError naming the violated bound.
    void validate() const;

    bool operator==(const RmnkConfig&) const = default;
};

/// An RMNK instance: M pseudo-Boolean objectives over N bits, each the mean
/// of N lookup-table components on (x_i, partners...). Immutable once
/// generated; safe to share across threads.
///
/// Table rows are indexed with x_i as bit 0 and the j-th epistatic partner
/// as bit j, matching the slot ordering of the Pauli-Z compilation.
class RmnkLandscape {
  public:
    /// Deterministic generation: one xoshiro256++ stream seeded from
    /// config.seed, consumed links-first (objective-major, then position),
    /// then tables (position-major, then row; M correlated draws per row).
    ///
    /// When rho != 0 the epistatic link sets are shared across objectives;
    /// the per-(position,row) alignment of correlated table draws is what
    /// produces the requested inter-objective correlation. Uncorrelated
    /// instances draw independent links per objective.
    static RmnkLandscape generate(const RmnkConfig& config);

    const RmnkConfig& config() const { return config_; }
    int n_vars() const { return config_.n_vars; }
    int n_objectives() const { return config_.n_objectives; }
    int epistasis() const { return config_.epistasis; }

    const std::vector<int>& links(int m, int i) const { return links_[m][i]; }
    const std::vector<double>& table(int m, int i) const { return tables_[m][i]; }

    int table_row(int m, int i, Bits x) const {
        int row = static_cast<int>((x >> i) & 1ULL);
        const auto& partners = links_[m][i];
        for (std::size_t j = 0; j < partners.size(); ++j) {
            row |= static_cast<int>((x >> partners[j]) & 1ULL) << (j + 1);
        }
        return row;
    }

    ObjectiveVector evaluate(Bits x) const;

    /// All 2^N objective vectors, indexed by basis state. Guarded at
    /// kMaxExhaustiveVars.
    std::vector<ObjectiveVector> evaluate_all() const;

    /// Exhaustive MxM Pearson correlation matrix of the objectives.
    std::vector<std::vector<double>> measured_correlation() const;

    void save(const std::filesystem::path& path) const;
    static RmnkLandscape load(const std::filesystem::path& path);
    std::string to_json_string(int indent = -1) const;
    static RmnkLandscape from_json_string(const std::string& text);

    /// FNV-1a over config, links and raw table bits; stable across runs.
    std::uint64_t content_hash() const;

    bool operator==(const RmnkLandscape&) const = default;

    // Test hook: build from explicit parts (validated).
    static RmnkLandscape from_parts(RmnkConfig config,
                                    std::vector<std::vector<std::vector<int>>> links,
                                    std::vector<std::vector<std::vector<double>>> tables);

  private:
    RmnkLandscape() = default;
    static RmnkLandscape raw_generate(const RmnkConfig& config, std::uint64_t stream_seed);

    RmnkConfig config_;
    std::vector<std::vector<std::vector<int>>> links_;     // [m][i][j]
    std::vector<std::vector<std::vector<double>>> tables_; // [m][i][row]
};

}  // namespace qmoo
