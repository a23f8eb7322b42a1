#include "qmoo/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "qmoo/rng.hpp"

namespace qmoo {

namespace {

constexpr int kInstanceFormatVersion = 1;
constexpr double kTableEps = 1e-12;

double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

std::vector<int> sample_partners(Rng& rng, int n_vars, int self, int k) {
    std::vector<int> pool;
    pool.reserve(n_vars - 1);
    for (int v = 0; v < n_vars; ++v) {
        if (v != self) pool.push_back(v);
    }
    // Partial Fisher-Yates; the first k entries, in draw order, are the partners.
    for (int j = 0; j < k; ++j) {
        auto pick = j + static_cast<std::size_t>(rng.uniform_below(pool.size() - j));
        std::swap(pool[j], pool[pick]);
    }
    pool.resize(k);
    return pool;
}

// Empirical pairwise Pearson correlation of the objectives over the full
// solution space, reduced to its largest deviation from the target. Single
// pass with mean-shifted accumulators; degenerate objectives score infinity.
double correlation_deviation(const RmnkLandscape& ls, double rho) {
    const int n = ls.n_vars();
    const int m_objs = ls.n_objectives();
    const std::size_t count = std::size_t{1} << n;
    std::vector<double> sum(m_objs, 0.0);
    std::vector<double> cross(static_cast<std::size_t>(m_objs) * m_objs, 0.0);
    std::vector<double> value(m_objs);
    for (std::size_t x = 0; x < count; ++x) {
        for (int m = 0; m < m_objs; ++m) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += ls.table(m, i)[static_cast<std::size_t>(ls.table_row(m, i, x))];
            }
            value[m] = acc / n - 0.5;
        }
        for (int p = 0; p < m_objs; ++p) {
            sum[p] += value[p];
            for (int q = p; q < m_objs; ++q) cross[p * m_objs + q] += value[p] * value[q];
        }
    }
    double worst = 0.0;
    for (int p = 0; p < m_objs; ++p) {
        for (int q = p + 1; q < m_objs; ++q) {
            const double cov = cross[p * m_objs + q] / count - (sum[p] / count) * (sum[q] / count);
            const double var_p = cross[p * m_objs + p] / count - (sum[p] / count) * (sum[p] / count);
            const double var_q = cross[q * m_objs + q] / count - (sum[q] / count) * (sum[q] / count);
            if (var_p <= 0.0 || var_q <= 0.0) return std::numeric_limits<double>::infinity();
            worst = std::max(worst, std::abs(cov / std::sqrt(var_p * var_q) - rho));
        }
    }
    return worst;
}

int selection_attempts(int n_vars) {
    if (n_vars <= 16) return 256;
    if (n_vars <= 20) return 16;
    return 1;
}

}  // namespace

void RmnkConfig::validate() const {
    if (n_vars < 1) throw ConfigError("n_vars must satisfy N >= 1");
    if (n_objectives < 1) throw ConfigError("n_objectives must satisfy M >= 1");
    if (epistasis < 0 || epistasis > n_vars - 1)
        throw ConfigError("epistasis must satisfy 0 <= K <= N-1");
    if (n_objectives == 1) {
        if (rho != 0.0) throw ConfigError("rho must be 0 when M = 1");
    } else {
        const double lo = -1.0 / (n_objectives - 1);
        if (rho < lo || rho > 1.0)
            throw ConfigError("rho must satisfy -1/(M-1) <= rho <= 1");
    }
}

RmnkLandscape RmnkLandscape::generate(const RmnkConfig& config) {
    config.validate();
    if (config.n_objectives == 1) return raw_generate(config, config.seed);

    // Empirical correlation of one finite instance scatters around the
    // target (Eq. 8 holds in expectation; at K=1 only N * 2^(K+1) table
    // cells drive it). Draw a fixed number of candidate instances from
    // derived substreams and keep the one whose exhaustive pairwise
    // correlation lands closest to rho. Deterministic given the seed.
    const int attempts = selection_attempts(config.n_vars);
    RmnkLandscape best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int t = 0; t < attempts; ++t) {
        RmnkLandscape candidate =
            raw_generate(config, derive_seed(config.seed, "instance", static_cast<std::uint64_t>(t)));
        if (attempts == 1) return candidate;
        const double err = correlation_deviation(candidate, config.rho);
        if (err < best_err) {
            best_err = err;
            best = std::move(candidate);
        }
        if (best_err <= 0.03) break;
    }
    return best;
}

RmnkLandscape RmnkLandscape::raw_generate(const RmnkConfig& config, std::uint64_t stream_seed) {
    const int n = config.n_vars;
    const int m_objs = config.n_objectives;
    const int k = config.epistasis;
    const std::size_t rows = std::size_t{1} << (k + 1);

    Rng rng(stream_seed);
    RmnkLandscape ls;
    ls.config_ = config;

    // Links first, objective-major then position. With correlated
    // objectives a single shared link set keeps the per-locus rows aligned,
    // which Eqs. (7)-(8)'s collapse of the covariance double sum relies on.
    const bool shared_links = (config.rho != 0.0);
    ls.links_.resize(m_objs);
    for (int m = 0; m < m_objs; ++m) {
        if (shared_links && m > 0) {
            ls.links_[m] = ls.links_[0];
            continue;
        }
        ls.links_[m].resize(n);
        for (int i = 0; i < n; ++i) {
            ls.links_[m][i] = sample_partners(rng, n, i, k);
        }
    }

    // Tables, position-major then row; the M values of one (i, row) cell are
    // a jointly-drawn multivariate normal mapped through the normal CDF.
    // Sigma = (1-rho) I + rho J has the closed-form symmetric square root
    // a I + b J, exact at both boundary values of rho.
    const double a = std::sqrt(1.0 - config.rho);
    const double b =
        (std::sqrt(1.0 + (m_objs - 1) * config.rho) - a) / static_cast<double>(m_objs);

    ls.tables_.resize(m_objs);
    for (int m = 0; m < m_objs; ++m) {
        ls.tables_[m].assign(n, std::vector<double>(rows));
    }
    std::vector<double> z(m_objs);
    for (int i = 0; i < n; ++i) {
        for (std::size_t row = 0; row < rows; ++row) {
            double sum = 0.0;
            for (int m = 0; m < m_objs; ++m) {
                z[m] = rng.normal();
                sum += z[m];
            }
            for (int m = 0; m < m_objs; ++m) {
                double u = std_normal_cdf(a * z[m] + b * sum);
                ls.tables_[m][i][row] = std::clamp(u, kTableEps, 1.0 - kTableEps);
            }
        }
    }
    return ls;
}

ObjectiveVector RmnkLandscape::evaluate(Bits x) const {
    const int n = config_.n_vars;
    if (n < 64 && (x >> n) != 0) throw InputError("bitstring length exceeds n_vars");
    ObjectiveVector out(config_.n_objectives);
    for (int m = 0; m < config_.n_objectives; ++m) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += tables_[m][i][static_cast<std::size_t>(table_row(m, i, x))];
        }
        out[m] = acc / n;
    }
    return out;
}

std::vector<ObjectiveVector> RmnkLandscape::evaluate_all() const {
    const int n = config_.n_vars;
    if (n > kMaxExhaustiveVars)
        throw ResourceError("evaluate_all requires n_vars <= " + std::to_string(kMaxExhaustiveVars));
    const std::size_t count = std::size_t{1} << n;
    std::vector<ObjectiveVector> out(count);
    for (std::size_t x = 0; x < count; ++x) {
        out[x] = evaluate(static_cast<Bits>(x));
    }
    return out;
}

std::vector<std::vector<double>> RmnkLandscape::measured_correlation() const {
    const auto values = evaluate_all();
    const int m_objs = config_.n_objectives;
    const double count = static_cast<double>(values.size());

    std::vector<double> mean(m_objs, 0.0);
    for (const auto& v : values) {
        for (int m = 0; m < m_objs; ++m) mean[m] += v[m];
    }
    for (auto& mu : mean) mu /= count;

    std::vector<std::vector<double>> cov(m_objs, std::vector<double>(m_objs, 0.0));
    for (const auto& v : values) {
        for (int p = 0; p < m_objs; ++p) {
            for (int q = p; q < m_objs; ++q) {
                cov[p][q] += (v[p] - mean[p]) * (v[q] - mean[q]);
            }
        }
    }
    std::vector<std::vector<double>> corr(m_objs, std::vector<double>(m_objs, 1.0));
    for (int p = 0; p < m_objs; ++p) {
        if (cov[p][p] <= 0.0)
            throw Error("undefined correlation: objective " + std::to_string(p) +
                        " has zero variance");
    }
    for (int p = 0; p < m_objs; ++p) {
        for (int q = p + 1; q < m_objs; ++q) {
            double c = cov[p][q] / std::sqrt(cov[p][p] * cov[q][q]);
            corr[p][q] = corr[q][p] = c;
        }
    }
    return corr;
}

std::string RmnkLandscape::to_json_string(int indent) const {
    nlohmann::json j;
    j["format_version"] = kInstanceFormatVersion;
    j["config"] = {{"n_vars", config_.n_vars},
                   {"n_objectives", config_.n_objectives},
                   {"epistasis", config_.epistasis},
                   {"rho", config_.rho},
                   {"seed", config_.seed}};
    j["links"] = links_;
    j["tables"] = tables_;
    return j.dump(indent);
}

RmnkLandscape RmnkLandscape::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance parse error: ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kInstanceFormatVersion) {
            throw FormatError("unsupported instance format_version " + std::to_string(version) +
                              " (expected " + std::to_string(kInstanceFormatVersion) + ")");
        }
        const auto& jc = j.at("config");
        RmnkConfig config;
        config.n_vars = jc.at("n_vars").get<int>();
        config.n_objectives = jc.at("n_objectives").get<int>();
        config.epistasis = jc.at("epistasis").get<int>();
        config.rho = jc.at("rho").get<double>();
        config.seed = jc.at("seed").get<std::uint64_t>();
        return from_parts(config, j.at("links").get<std::vector<std::vector<std::vector<int>>>>(),
                          j.at("tables").get<std::vector<std::vector<std::vector<double>>>>());
    } catch (const FormatError&) {
        throw;
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("instance parse error: ") + e.what());
    }
}

RmnkLandscape RmnkLandscape::from_parts(RmnkConfig config,
                                        std::vector<std::vector<std::vector<int>>> links,
                                        std::vector<std::vector<std::vector<double>>> tables) {
    config.validate();
    const auto m_objs = static_cast<std::size_t>(config.n_objectives);
    const auto n = static_cast<std::size_t>(config.n_vars);
    const std::size_t rows = std::size_t{1} << (config.epistasis + 1);
    if (links.size() != m_objs || tables.size() != m_objs)
        throw ParseError("instance parse error: objective count mismatch");
    for (std::size_t m = 0; m < m_objs; ++m) {
        if (links[m].size() != n || tables[m].size() != n)
            throw ParseError("instance parse error: position count mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (links[m][i].size() != static_cast<std::size_t>(config.epistasis))
                throw ParseError("instance parse error: partner list length mismatch");
            for (int p : links[m][i]) {
                if (p < 0 || p >= config.n_vars || p == static_cast<int>(i))
                    throw ParseError("instance parse error: partner index out of range");
            }
            if (tables[m][i].size() != rows)
                throw ParseError("instance parse error: table length mismatch");
            for (double v : tables[m][i]) {
                if (!(v > 0.0 && v < 1.0))
                    throw ParseError("instance parse error: table value outside (0,1)");
            }
        }
    }
    RmnkLandscape ls;
    ls.config_ = config;
    ls.links_ = std::move(links);
    ls.tables_ = std::move(tables);
    return ls;
}

void RmnkLandscape::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << to_json_string(1) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

RmnkLandscape RmnkLandscape::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_string(buf.str());
}

std::uint64_t RmnkLandscape::content_hash() const {
    std::uint64_t h = fnv1a64(&config_.n_vars, sizeof config_.n_vars);
    h = fnv1a64(&config_.n_objectives, sizeof config_.n_objectives, h);
    h = fnv1a64(&config_.epistasis, sizeof config_.epistasis, h);
    h = fnv1a64(&config_.rho, sizeof config_.rho, h);
    h = fnv1a64(&config_.seed, sizeof config_.seed, h);
    for (const auto& per_obj : links_) {
        for (const auto& partners : per_obj) {
            h = fnv1a64(partners.data(), partners.size() * sizeof(int), h);
        }
    }
    for (const auto& per_obj : tables_) {
        for (const auto& table : per_obj) {
            h = fnv1a64(table.data(), table.size() * sizeof(double), h);
        }
    }
    return h;
}

}  // namespace qmoo
