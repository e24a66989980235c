#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "kucb/errors.hpp"
#include "kucb/experiments.hpp"

namespace kucb {

using nlohmann::json;

namespace {

[[noreturn]] void bad_config(const std::string& message) { throw ConfigError("config: " + message); }

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
    if (!j.is_object()) bad_config(where + " must be an object");
    std::string offenders;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            offenders += (offenders.empty() ? "" : ", ") + it.key();
        }
    }
    if (!offenders.empty()) bad_config(where + ": unknown keys [" + offenders + "]");
    std::string missing;
    for (const auto& key : required) {
        if (!j.count(key)) missing += (missing.empty() ? "" : ", ") + key;
    }
    if (!missing.empty()) bad_config(where + ": missing required keys [" + missing + "]");
}

double need_number(const json& j, const std::string& where, const std::string& key) {
    if (!j.count(key) || !j.at(key).is_number()) bad_config(where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

int need_int(const json& j, const std::string& where, const std::string& key) {
    if (!j.count(key) || !j.at(key).is_number_integer()) {
        bad_config(where + "." + key + " must be an integer");
    }
    return j.at(key).get<int>();
}

std::string need_string(const json& j, const std::string& where, const std::string& key) {
    if (!j.count(key) || !j.at(key).is_string()) bad_config(where + "." + key + " must be a string");
    return j.at(key).get<std::string>();
}

std::vector<double> need_number_list(const json& j, const std::string& where,
                                     const std::string& key) {
    if (!j.count(key) || !j.at(key).is_array()) bad_config(where + "." + key + " must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) bad_config(where + "." + key + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<int> need_int_list(const json& j, const std::string& where, const std::string& key) {
    if (!j.count(key) || !j.at(key).is_array()) bad_config(where + "." + key + " must be an array");
    std::vector<int> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number_integer()) bad_config(where + "." + key + " must contain integers");
        out.push_back(v.get<int>());
    }
    return out;
}

KernelConfig parse_kernel(const json& j) {
    KernelConfig k;
    const std::string family = need_string(j, "kernel", "family");
    if (family == "squared_exponential" || family == "se") {
        require_keys(j, "kernel", {"family", "bandwidth"}, {"family", "bandwidth"});
        k.family = KernelConfig::Family::kSquaredExponential;
        k.bandwidth = need_number(j, "kernel", "bandwidth");
    } else if (family == "matern") {
        require_keys(j, "kernel", {"family", "bandwidth", "nu", "general_nu"},
                     {"family", "bandwidth", "nu"});
        k.family = KernelConfig::Family::kMatern;
        k.bandwidth = need_number(j, "kernel", "bandwidth");
        k.nu = need_number(j, "kernel", "nu");
        if (j.count("general_nu")) {
            if (!j.at("general_nu").is_boolean()) bad_config("kernel.general_nu must be a boolean");
            k.general_nu = j.at("general_nu").get<bool>();
        }
    } else if (family == "mercer" || family == "mercer_synthetic") {
        require_keys(j, "kernel", {"family", "rank", "decay_c", "decay_beta", "dim"},
                     {"family", "rank", "decay_c", "decay_beta"});
        k.family = KernelConfig::Family::kMercerSynthetic;
        k.rank = need_int(j, "kernel", "rank");
        k.decay_c = need_number(j, "kernel", "decay_c");
        k.decay_beta = need_number(j, "kernel", "decay_beta");
        if (j.count("dim")) k.dim = need_int(j, "kernel", "dim");
    } else {
        bad_config("kernel.family '" + family + "' is not one of se|matern|mercer");
    }
    return k;
}

json kernel_to_json(const KernelConfig& k) {
    json j;
    switch (k.family) {
        case KernelConfig::Family::kSquaredExponential:
            j["family"] = "se";
            j["bandwidth"] = k.bandwidth;
            break;
        case KernelConfig::Family::kMatern:
            j["family"] = "matern";
            j["bandwidth"] = k.bandwidth;
            j["nu"] = k.nu;
            j["general_nu"] = k.general_nu;
            break;
        case KernelConfig::Family::kMercerSynthetic:
            j["family"] = "mercer";
            j["rank"] = k.rank;
            j["decay_c"] = k.decay_c;
            j["decay_beta"] = k.decay_beta;
            j["dim"] = k.dim;
            break;
    }
    return j;
}

GridConfig parse_grid(const json& j) {
    require_keys(j, "grid", {"low", "high", "count", "dim"}, {"low", "high", "count"});
    GridConfig g;
    g.low = need_number(j, "grid", "low");
    g.high = need_number(j, "grid", "high");
    g.count = need_int(j, "grid", "count");
    if (j.count("dim")) g.dim = need_int(j, "grid", "dim");
    if (g.count < 1) bad_config("grid.count must be >= 1");
    if (g.dim < 1) bad_config("grid.dim must be >= 1");
    if (!(g.high >= g.low)) bad_config("grid.high must be >= grid.low");
    return g;
}

RhoPolicy parse_rho(const json& j) {
    RhoPolicy p;
    const std::string policy = need_string(j, "rho", "policy");
    if (policy == "fixed") {
        require_keys(j, "rho", {"policy", "value"}, {"policy", "value"});
        p.kind = RhoPolicy::Kind::kFixed;
        p.value = need_number(j, "rho", "value");
        if (!(p.value > 0.0)) bad_config("rho.value must be positive");
    } else if (policy == "schedule") {
        require_keys(j, "rho", {"policy", "beta", "scale"}, {"policy", "beta"});
        p.kind = RhoPolicy::Kind::kSchedule;
        p.beta = need_number(j, "rho", "beta");
        if (j.count("scale")) p.scale = need_number(j, "rho", "scale");
    } else {
        bad_config("rho.policy '" + policy + "' is not one of fixed|schedule");
    }
    return p;
}

NoiseKind parse_noise_kind(const std::string& name) {
    if (name == "gaussian") return NoiseKind::kGaussian;
    if (name == "rademacher") return NoiseKind::kRademacher;
    bad_config("noise '" + name + "' is not one of gaussian|rademacher|both");
}

DesignRule parse_design(const std::string& name) {
    if (name == "fixed") return DesignRule::kFixedSweep;
    if (name == "uniform") return DesignRule::kUniformRandom;
    if (name == "width_greedy") return DesignRule::kWidthGreedy;
    bad_config("design '" + name + "' is not one of fixed|uniform|width_greedy");
}

}  // namespace

std::string suite_kind_name(SuiteKind kind) {
    switch (kind) {
        case SuiteKind::kVilleCoverage: return "ville_coverage";
        case SuiteKind::kSupermartingaleDecay: return "supermartingale_decay";
        case SuiteKind::kGramIdentity: return "gram_identity";
        case SuiteKind::kTruncationConvergence: return "truncation_convergence";
        case SuiteKind::kRegretScaling: return "regret_scaling";
        case SuiteKind::kRadiusCompare: return "radius_compare";
        case SuiteKind::kInfogainSandwich: return "infogain_sandwich";
        case SuiteKind::kPotentialAudit: return "potential_audit";
    }
    return "unknown";
}

SuiteKind suite_kind_from_name(const std::string& name) {
    for (SuiteKind kind :
         {SuiteKind::kVilleCoverage, SuiteKind::kSupermartingaleDecay, SuiteKind::kGramIdentity,
          SuiteKind::kTruncationConvergence, SuiteKind::kRegretScaling, SuiteKind::kRadiusCompare,
          SuiteKind::kInfogainSandwich, SuiteKind::kPotentialAudit}) {
        if (suite_kind_name(kind) == name) return kind;
    }
    bad_config("kind '" + name + "' is not a known suite");
}

Kernel KernelConfig::build() const {
    switch (family) {
        case Family::kSquaredExponential: return Kernel::squared_exponential(bandwidth);
        case Family::kMatern: return Kernel::matern(nu, bandwidth, general_nu, dim);
        case Family::kMercerSynthetic:
            return Kernel::mercer_synthetic(rank, decay_c, decay_beta, dim);
    }
    throw ConfigError("kernel config: unknown family");
}

std::vector<Point> GridConfig::build() const {
    std::vector<Point> out;
    if (dim == 1) {
        out.reserve(count);
        for (int i = 0; i < count; ++i) {
            const double x = count == 1 ? low : low + (high - low) * i / (count - 1);
            out.push_back(point1d(x));
        }
        return out;
    }
    // count is the per-axis resolution in d > 1.
    std::vector<int> idx(dim, 0);
    for (;;) {
        Point p(dim);
        for (int c = 0; c < dim; ++c) {
            p[c] = count == 1 ? low : low + (high - low) * idx[c] / (count - 1);
        }
        out.push_back(p);
        int c = dim - 1;
        while (c >= 0 && ++idx[c] == count) idx[c--] = 0;
        if (c < 0) break;
    }
    return out;
}

double RhoPolicy::resolve(double horizon) const {
    if (kind == Kind::kFixed) return value;
    return rho_schedule(horizon, beta, scale);
}

double ExperimentConfig::tolerance(const std::string& name) const {
    const auto it = tolerances.find(name);
    if (it == tolerances.end()) {
        throw ConfigError("config: tolerances." + name + " must be declared for suite '" +
                          suite_kind_name(kind) + "'");
    }
    return it->second;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    static const std::set<std::string> common = {"kind",   "kernel", "grid",       "rho",
                                                 "sigma",  "delta",  "noise",      "design",
                                                 "horizon", "seeds",  "tolerances", "output_prefix"};
    std::set<std::string> allowed = common;
    std::set<std::string> required = {"kind", "kernel"};

    ExperimentConfig c;
    if (!j.is_object()) bad_config("top level must be an object");
    if (!j.count("kind")) bad_config("missing required key 'kind'");
    c.kind = suite_kind_from_name(need_string(j, "config", "kind"));

    switch (c.kind) {
        case SuiteKind::kVilleCoverage:
            allowed.insert({"deltas"});
            required.insert({"grid", "rho", "sigma", "horizon", "seeds", "deltas", "tolerances"});
            break;
        case SuiteKind::kSupermartingaleDecay:
            required.insert({"grid", "rho", "sigma", "horizon", "seeds", "tolerances"});
            break;
        case SuiteKind::kGramIdentity:
            allowed.insert({"instances", "max_rank", "max_t", "rho_values"});
            required.insert({"seeds", "instances", "tolerances"});
            break;
        case SuiteKind::kTruncationConvergence:
            allowed.insert({"projections"});
            required.insert({"grid", "rho", "sigma", "horizon", "seeds", "tolerances"});
            break;
        case SuiteKind::kRegretScaling:
            allowed.insert({"horizons", "target"});
            required.insert({"grid", "rho", "sigma", "delta", "horizons", "seeds", "target",
                             "tolerances"});
            break;
        case SuiteKind::kRadiusCompare:
            allowed.insert({"rho_values", "eta_values", "fixture_points"});
            required.insert({"grid", "sigma", "delta", "seeds", "rho_values", "eta_values",
                             "fixture_points", "tolerances"});
            break;
        case SuiteKind::kInfogainSandwich:
            allowed.insert({"betas", "rho_values", "include_schedule_rho"});
            required.insert({"grid", "horizon", "betas", "rho_values", "tolerances"});
            break;
        case SuiteKind::kPotentialAudit:
            required.insert({"grid", "rho", "sigma", "horizon", "seeds", "tolerances"});
            break;
    }
    require_keys(j, "config", allowed, required);

    c.kernel = parse_kernel(j.at("kernel"));
    if (j.count("grid")) c.grid = parse_grid(j.at("grid"));
    if (j.count("rho")) c.rho = parse_rho(j.at("rho"));
    if (j.count("sigma")) c.sigma = need_number(j, "config", "sigma");
    if (j.count("delta")) {
        c.delta = need_number(j, "config", "delta");
        if (!(c.delta > 0.0 && c.delta < 1.0)) bad_config("delta must lie in (0,1)");
    }
    if (j.count("deltas")) {
        c.deltas = need_number_list(j, "config", "deltas");
        for (double d : c.deltas) {
            if (!(d > 0.0 && d < 1.0)) bad_config("deltas entries must lie in (0,1)");
        }
    }
    if (j.count("noise")) {
        const std::string noise = need_string(j, "config", "noise");
        if (noise == "both") {
            c.both_noise_kinds = true;
        } else {
            c.noise = parse_noise_kind(noise);
        }
    }
    if (j.count("design")) c.design = parse_design(need_string(j, "config", "design"));
    if (j.count("horizon")) {
        c.horizon = need_int(j, "config", "horizon");
        if (c.horizon < 0) bad_config("horizon must be nonnegative");
    }
    if (j.count("horizons")) {
        c.horizons = need_int_list(j, "config", "horizons");
        if (c.horizons.empty()) bad_config("horizons needs at least one entry");
        for (int h : c.horizons) {
            if (h < 1) bad_config("horizons entries must be >= 1");
        }
    }
    if (j.count("seeds")) {
        require_keys(j.at("seeds"), "seeds", {"count", "master"}, {"count", "master"});
        c.seeds.count = need_int(j.at("seeds"), "seeds", "count");
        if (c.seeds.count < 1) bad_config("seeds.count must be >= 1");
        if (!j.at("seeds").at("master").is_number_unsigned() &&
            !j.at("seeds").at("master").is_number_integer()) {
            bad_config("seeds.master must be an integer");
        }
        c.seeds.master = j.at("seeds").at("master").get<std::uint64_t>();
    }
    if (j.count("target")) {
        require_keys(j.at("target"), "target", {"center_indices", "coefficients", "norm_bound"},
                     {"center_indices", "coefficients"});
        c.target.center_indices = need_int_list(j.at("target"), "target", "center_indices");
        c.target.coefficients = need_number_list(j.at("target"), "target", "coefficients");
        if (c.target.center_indices.size() != c.target.coefficients.size()) {
            bad_config("target.center_indices and target.coefficients disagree in length");
        }
        if (j.at("target").count("norm_bound")) {
            c.target.norm_bound = need_number(j.at("target"), "target", "norm_bound");
        }
    }
    if (j.count("instances")) c.instances = need_int(j, "config", "instances");
    if (j.count("max_rank")) c.max_rank = need_int(j, "config", "max_rank");
    if (j.count("max_t")) c.max_t = need_int(j, "config", "max_t");
    if (j.count("rho_values")) c.rho_values = need_number_list(j, "config", "rho_values");
    if (j.count("eta_values")) c.eta_values = need_number_list(j, "config", "eta_values");
    if (j.count("fixture_points")) c.fixture_points = need_int(j, "config", "fixture_points");
    if (j.count("projections")) c.projections = need_int_list(j, "config", "projections");
    if (j.count("betas")) c.betas = need_number_list(j, "config", "betas");
    if (j.count("include_schedule_rho")) {
        if (!j.at("include_schedule_rho").is_boolean()) {
            bad_config("include_schedule_rho must be a boolean");
        }
        c.include_schedule_rho = j.at("include_schedule_rho").get<bool>();
    }
    if (j.count("tolerances")) {
        if (!j.at("tolerances").is_object()) bad_config("tolerances must be an object");
        for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it) {
            if (!it.value().is_number()) bad_config("tolerances." + it.key() + " must be a number");
            c.tolerances[it.key()] = it.value().get<double>();
        }
    }
    if (j.count("output_prefix")) c.output_prefix = need_string(j, "config", "output_prefix");
    if (c.output_prefix.empty()) c.output_prefix = suite_kind_name(c.kind);
    return c;
}

json ExperimentConfig::to_json() const {
    // Emits exactly the fields the per-kind schema accepts, so that
    // from_json(to_json(c)) round-trips.
    json j;
    j["kind"] = suite_kind_name(kind);
    j["kernel"] = kernel_to_json(kernel);
    j["sigma"] = sigma;
    j["delta"] = delta;
    j["noise"] = both_noise_kinds ? "both"
                 : noise == NoiseKind::kGaussian ? "gaussian"
                                                 : "rademacher";
    j["design"] = design == DesignRule::kFixedSweep ? "fixed"
                  : design == DesignRule::kUniformRandom ? "uniform"
                                                         : "width_greedy";
    j["horizon"] = horizon;
    j["seeds"] = {{"count", seeds.count}, {"master", seeds.master}};
    j["tolerances"] = tolerances;
    j["output_prefix"] = output_prefix;

    const auto grid_json = [&] {
        j["grid"] = {{"low", grid.low}, {"high", grid.high}, {"count", grid.count},
                     {"dim", grid.dim}};
    };
    const auto rho_json = [&] {
        if (rho.kind == RhoPolicy::Kind::kFixed) {
            j["rho"] = {{"policy", "fixed"}, {"value", rho.value}};
        } else {
            j["rho"] = {{"policy", "schedule"}, {"beta", rho.beta}, {"scale", rho.scale}};
        }
    };
    switch (kind) {
        case SuiteKind::kVilleCoverage:
            grid_json();
            rho_json();
            j["deltas"] = deltas;
            break;
        case SuiteKind::kSupermartingaleDecay:
        case SuiteKind::kPotentialAudit:
            grid_json();
            rho_json();
            break;
        case SuiteKind::kGramIdentity:
            j["instances"] = instances;
            j["max_rank"] = max_rank;
            j["max_t"] = max_t;
            j["rho_values"] = rho_values;
            break;
        case SuiteKind::kTruncationConvergence:
            grid_json();
            rho_json();
            if (!projections.empty()) j["projections"] = projections;
            break;
        case SuiteKind::kRegretScaling:
            grid_json();
            rho_json();
            j["horizons"] = horizons;
            j["target"] = {{"center_indices", target.center_indices},
                           {"coefficients", target.coefficients},
                           {"norm_bound", target.norm_bound}};
            break;
        case SuiteKind::kRadiusCompare:
            grid_json();
            j["rho_values"] = rho_values;
            j["eta_values"] = eta_values;
            j["fixture_points"] = fixture_points;
            break;
        case SuiteKind::kInfogainSandwich:
            grid_json();
            j["betas"] = betas;
            j["rho_values"] = rho_values;
            j["include_schedule_rho"] = include_schedule_rho;
            break;
    }
    return j;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string canonical = config.to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace kucb
