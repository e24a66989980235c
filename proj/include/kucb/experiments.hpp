#ifndef KUCB_EXPERIMENTS_HPP
#define KUCB_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kucb/bandit.hpp"
#include "kucb/confidence.hpp"
#include "kucb/kernels.hpp"

namespace kucb {

enum class SuiteKind {
    kVilleCoverage,
    kSupermartingaleDecay,
    kGramIdentity,
    kTruncationConvergence,
    kRegretScaling,
    kRadiusCompare,
    kInfogainSandwich,
    kPotentialAudit,
};

std::string suite_kind_name(SuiteKind kind);
SuiteKind suite_kind_from_name(const std::string& name);

struct KernelConfig {
    enum class Family { kSquaredExponential, kMatern, kMercerSynthetic };
    Family family = Family::kMercerSynthetic;
    double bandwidth = 1.0;
    double nu = 1.5;
    bool general_nu = false;
    int rank = 6;
    double decay_c = 1.0;
    double decay_beta = 2.0;
    int dim = 1;

    Kernel build() const;
};

struct GridConfig {
    double low = 0.0;
    double high = 1.0;
    int count = 33;
    int dim = 1;

    std::vector<Point> build() const;
};

struct RhoPolicy {
    enum class Kind { kFixed, kSchedule };
    Kind kind = Kind::kFixed;
    double value = 1.0;   // fixed
    double beta = 2.0;    // schedule
    double scale = 1.0;   // schedule

    double resolve(double horizon) const;
};

struct SeedsConfig {
    int count = 1;
    std::uint64_t master = 1;
};

struct TargetConfig {
    std::vector<int> center_indices;       // indices into the grid
    std::vector<double> coefficients;
    double norm_bound = 0.0;               // <= 0: use the exact norm
};

// One declarative experiment. Field use depends on `kind`; the JSON parser
// enforces a closed per-kind schema (unknown keys are errors).
struct ExperimentConfig {
    SuiteKind kind = SuiteKind::kGramIdentity;
    KernelConfig kernel;
    GridConfig grid;
    RhoPolicy rho;
    double sigma = 1.0;
    double delta = 0.05;
    std::vector<double> deltas{0.01, 0.05, 0.1};
    NoiseKind noise = NoiseKind::kGaussian;
    bool both_noise_kinds = false;  // "noise": "both"
    DesignRule design = DesignRule::kWidthGreedy;
    int horizon = 100;
    std::vector<int> horizons;  // regret scaling
    SeedsConfig seeds;
    TargetConfig target;        // regret scaling
    std::string output_prefix;  // defaults to the suite kind name

    // Suite-specific knobs.
    int instances = 500;             // gram identity
    int max_rank = 8;                // gram identity
    int max_t = 30;                  // gram identity
    std::vector<double> rho_values{0.5, 1.0, 4.0};  // gram identity / radius compare
    std::vector<double> eta_values{1e-10, 0.5, 1.0};  // radius compare
    int fixture_points = 12;         // radius compare
    std::vector<int> projections;    // truncation convergence; empty = 1..rank
    std::vector<double> betas{2.0};  // infogain sandwich
    bool include_schedule_rho = true;  // infogain sandwich

    // Pass/fail thresholds: declared here, never hard-coded in suite code.
    std::map<std::string, double> tolerances;

    double tolerance(const std::string& name) const;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
};

struct CriterionResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct SuiteReport {
    SuiteKind kind = SuiteKind::kGramIdentity;
    bool pass = false;
    std::vector<CriterionResult> criteria;
    std::vector<std::string> artifacts;  // paths written, relative to out dir
    std::string config_hash;

    nlohmann::json to_json() const;
};

// Runs the configured suite, writes CSV artifacts plus
// <prefix>_report.json under `output_dir`, and returns the report.
SuiteReport run_suite(const ExperimentConfig& config, const std::string& output_dir);

// Stable FNV-1a hash of the canonical config serialization.
std::string config_hash(const ExperimentConfig& config);

}  // namespace kucb

#endif
