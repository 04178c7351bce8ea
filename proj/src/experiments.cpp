#include "rcm/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rcm/errors.hpp"
#include "rcm/parallel.hpp"
#include "rcm/random.hpp"
#include "rcm/sampler.hpp"

namespace rcm {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Field-by-field reader that records every problem instead of stopping at the first.
class FieldReader {
public:
    explicit FieldReader(std::vector<std::string>& errors) : errors_(errors) {}

    std::optional<double> number(const json& obj, const char* key, const std::string& path, bool required) {
        if (!obj.contains(key)) {
            if (required) errors_.push_back(path + key + ": missing");
            return std::nullopt;
        }
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            errors_.push_back(path + key + ": expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    void fail(const std::string& msg) { errors_.push_back(msg); }

private:
    std::vector<std::string>& errors_;
};

std::string join_errors(const std::vector<std::string>& errors) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    return msg;
}

ConnectionSpec connection_from_json(const json& c, const std::string& path, FieldReader& rd) {
    ConnectionSpec spec;
    if (!c.is_object()) {
        rd.fail(path + ": expected an object");
        return spec;
    }
    try {
        spec.kind = connection_kind_from_string(c.value("kind", std::string("rayleigh")));
    } catch (const ValidationError& e) {
        rd.fail(path + "kind: " + e.what());
    }
    switch (spec.kind) {
    case ConnectionKind::Rayleigh:
        if (auto b = rd.number(c, "beta", path, true)) {
            if (!(*b > 0)) rd.fail(path + "beta: must be positive");
            spec.beta = *b;
        }
        if (auto e = rd.number(c, "eta", path, false)) {
            if (!(*e > 0)) rd.fail(path + "eta: must be positive");
            spec.eta = *e;
        }
        break;
    case ConnectionKind::HardDisk:
        if (auto r0 = rd.number(c, "r0", path, true)) {
            if (!(*r0 > 0)) rd.fail(path + "r0: must be positive");
            spec.r0 = *r0;
        }
        break;
    case ConnectionKind::Tabulated:
        if (!c.contains("table") || !c.at("table").is_array()) {
            rd.fail(path + "table: expected an array of [distance, probability] pairs");
            break;
        }
        for (const auto& kn : c.at("table")) {
            if (!kn.is_array() || kn.size() != 2 || !kn[0].is_number() || !kn[1].is_number()) {
                rd.fail(path + "table: each knot must be [distance, probability]");
                break;
            }
            spec.table.push_back({kn[0].get<double>(), kn[1].get<double>()});
        }
        try {
            if (!spec.table.empty()) spec.validate();
        } catch (const ValidationError& e) {
            rd.fail(path + "table: " + e.what());
        }
        break;
    }
    return spec;
}

ModelParams params_from_json(const json& p, const std::string& path, FieldReader& rd) {
    ModelParams mp;
    if (!p.is_object()) {
        rd.fail(path + ": expected an object");
        return mp;
    }
    if (auto v = rd.number(p, "rho", path, true)) {
        if (!(*v > 0)) rd.fail(path + "rho: must be positive");
        mp.rho = *v;
    }
    if (auto v = rd.number(p, "anchor_distance", path, true)) {
        if (!(*v >= 0)) rd.fail(path + "anchor_distance: must be nonnegative");
        mp.anchor_distance = *v;
    }
    if (auto v = rd.number(p, "k", path, true)) {
        if (!(*v >= 1) || std::floor(*v) != *v) rd.fail(path + "k: must be a positive integer");
        mp.k = static_cast<int>(*v);
    }
    if (p.contains("connection")) {
        mp.connection = connection_from_json(p.at("connection"), path + "connection.", rd);
    } else {
        rd.fail(path + "connection: missing");
    }
    if (auto v = rd.number(p, "margin", path, false)) {
        if (!(*v > 0)) rd.fail(path + "margin: must be positive");
        mp.margin = *v;
    } else {
        try {
            mp.margin = default_margin(mp.connection, std::max(mp.k, 1));
        } catch (const ValidationError&) {
            // already reported against the connection fields
        }
    }
    return mp;
}

} // namespace

void ExperimentConfig::validate() const {
    std::vector<std::string> errors;
    if (name.empty()) errors.push_back("name: must be nonempty");
    if (replications < 1) errors.push_back("replications: must be at least 1");
    if (params_grid.empty()) errors.push_back("params_grid: must contain at least one point");
    for (std::size_t i = 0; i < params_grid.size(); ++i) {
        try {
            params_grid[i].validate();
        } catch (const ValidationError& e) {
            errors.push_back("params_grid[" + std::to_string(i) + "]: " + e.what());
        }
    }
    for (int m : bracket_orders) {
        if (m < 0) errors.push_back("bracket_orders: orders must be nonnegative");
    }
    if (!errors.empty()) throw ValidationError(join_errors(errors));
}

json to_json(const ModelParams& p) {
    json c;
    c["kind"] = std::string(to_string(p.connection.kind));
    switch (p.connection.kind) {
    case ConnectionKind::Rayleigh:
        c["beta"] = p.connection.beta;
        c["eta"] = p.connection.eta;
        break;
    case ConnectionKind::HardDisk: c["r0"] = p.connection.r0; break;
    case ConnectionKind::Tabulated:
        c["table"] = json::array();
        for (const auto& kn : p.connection.table) c["table"].push_back({kn.distance, kn.probability});
        break;
    }
    return {{"rho", p.rho}, {"anchor_distance", p.anchor_distance}, {"k", p.k}, {"margin", p.margin}, {"connection", c}};
}

json to_json(const ExperimentConfig& c) {
    json grid = json::array();
    for (const auto& p : c.params_grid) grid.push_back(to_json(p));
    return {{"name", c.name},
            {"params_grid", grid},
            {"replications", c.replications},
            {"seed", c.seed},
            {"outputs", c.outputs.generic_string()},
            {"strict_numerics", c.strict_numerics},
            {"bracket_orders", c.bracket_orders},
            {"raw_counts", c.raw_counts}};
}

ExperimentConfig config_from_json(const json& doc) {
    std::vector<std::string> errors;
    FieldReader rd(errors);
    ExperimentConfig cfg;
    if (!doc.is_object()) throw ValidationError("invalid config: top level must be an object");

    if (doc.contains("name")) {
        if (doc.at("name").is_string()) cfg.name = doc.at("name").get<std::string>();
        else errors.push_back("name: expected a string");
    }
    if (auto v = rd.number(doc, "replications", "", true)) {
        if (!(*v >= 1) || std::floor(*v) != *v) errors.push_back("replications: must be a positive integer");
        else cfg.replications = static_cast<std::uint64_t>(*v);
    }
    if (doc.contains("seed")) {
        if (doc.at("seed").is_number_unsigned()) cfg.seed = doc.at("seed").get<std::uint64_t>();
        else errors.push_back("seed: expected a nonnegative integer");
    }
    if (doc.contains("outputs")) {
        if (doc.at("outputs").is_string()) cfg.outputs = doc.at("outputs").get<std::string>();
        else errors.push_back("outputs: expected a path string");
    }
    if (doc.contains("strict_numerics")) {
        if (doc.at("strict_numerics").is_boolean()) cfg.strict_numerics = doc.at("strict_numerics").get<bool>();
        else errors.push_back("strict_numerics: expected a boolean");
    }
    if (doc.contains("raw_counts")) {
        if (doc.at("raw_counts").is_boolean()) cfg.raw_counts = doc.at("raw_counts").get<bool>();
        else errors.push_back("raw_counts: expected a boolean");
    }
    if (doc.contains("bracket_orders")) {
        const auto& orders = doc.at("bracket_orders");
        cfg.bracket_orders.clear();
        if (!orders.is_array()) errors.push_back("bracket_orders: expected an array");
        else {
            for (const auto& o : orders) {
                if (o.is_number_integer() && o.get<long long>() >= 0) cfg.bracket_orders.push_back(o.get<int>());
                else errors.push_back("bracket_orders: entries must be nonnegative integers");
            }
        }
    }
    if (!doc.contains("params_grid") || !doc.at("params_grid").is_array()) {
        errors.push_back("params_grid: expected an array");
    } else {
        const auto& grid = doc.at("params_grid");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            cfg.params_grid.push_back(params_from_json(grid[i], "params_grid[" + std::to_string(i) + "].", rd));
        }
        if (grid.empty()) errors.push_back("params_grid: must contain at least one point");
    }
    if (!errors.empty()) throw ValidationError(join_errors(errors));
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

std::vector<std::string> preset_names() {
    return {"fig-example", "fig-mean-var", "fig-distribution", "fig-existence"};
}

ExperimentConfig preset(const std::string& name, double anchor_distance) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.seed = 20171;
    cfg.outputs = "out";
    if (name == "fig-example") {
        // Three-hop paths at rho = beta = 1, unit separation.
        cfg.replications = 10'000;
        cfg.params_grid.push_back(make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 3));
    } else if (name == "fig-mean-var") {
        cfg.replications = 10'000;
        for (double rho : {0.5, 2.0, 5.0}) {
            for (int step = 0; step <= 20; ++step) {
                cfg.params_grid.push_back(make_params(rho, ConnectionSpec::rayleigh(1.0), 0.25 * step, 3));
            }
        }
    } else if (name == "fig-distribution") {
        cfg.replications = 100'000;
        for (double beta : {0.7, 0.5, 0.3}) {
            cfg.params_grid.push_back(make_params(2.0, ConnectionSpec::rayleigh(beta), anchor_distance, 3));
        }
    } else if (name == "fig-existence") {
        cfg.replications = 10'000;
        cfg.bracket_orders = {0, 1, 2, 3, 4, 5, 80};
        for (int k : {2, 3}) {
            for (double beta : {1.0, 1.5}) {
                for (int step = 1; step <= 20; ++step) {
                    cfg.params_grid.push_back(make_params(0.1 * step, ConnectionSpec::rayleigh(beta), 1.0, k));
                }
            }
        }
    } else {
        throw ValidationError("unknown preset '" + name + "'");
    }
    cfg.validate();
    return cfg;
}

std::uint64_t grid_point_seed(std::uint64_t master_seed, std::size_t index) {
    return hash_words({master_seed, static_cast<std::uint64_t>(index)});
}

ReplicationResult simulate_replication(const ModelParams& params, std::uint64_t seed, std::uint64_t replication) {
    const auto points = sample_conditioned_ppp(params, seed, replication);
    const LazyGraph g(points, params.connection, ReplicationKey{seed, replication});
    ReplicationResult res;
    res.count = count_khop_paths(g, params.k).count;
    if (params.k == 3) res.pairs = classify_pair_structures(g);
    return res;
}

std::vector<ReplicationResult> simulate_point(const ModelParams& params, std::uint64_t seed,
                                              std::uint64_t replications, unsigned threads) {
    params.validate();
    return parallel_map(replications, threads,
                        [&](std::size_t rep) { return simulate_replication(params, seed, rep); });
}

std::optional<double> MomentReport::reference_mean() const {
    if (analytic) return analytic->mean;
    if (numeric) return numeric->mean;
    return std::nullopt;
}

std::optional<double> MomentReport::reference_variance() const {
    if (analytic && analytic->variance) return analytic->variance;
    if (numeric && numeric->variance) return numeric->variance;
    return std::nullopt;
}

MomentReport aggregate(std::size_t grid_index, const ModelParams& params, std::uint64_t seed,
                       const std::vector<ReplicationResult>& results, const ExperimentConfig& config) {
    MomentReport rep;
    rep.grid_index = grid_index;
    rep.params = params;
    rep.seed = seed;

    PathCountSamples samples;
    samples.k = params.k;
    samples.params = params;
    samples.seed = seed;
    samples.counts.reserve(results.size());
    for (const auto& r : results) samples.counts.push_back(r.count);

    rep.empirical = summarize(samples.counts);
    for (auto c : samples.counts) ++rep.histogram[c];
    if (config.raw_counts) rep.raw_counts = samples.counts;

    if (params.connection.has_closed_form()) {
        if (params.k == 3) rep.analytic = variance_threehop_rayleigh(params);
        else rep.analytic = AnalyticMoments{mean_khop_rayleigh(params), std::nullopt, std::nullopt};
    } else {
        auto quad = QuadratureSpec::defaults_for(params);
        quad.strict = config.strict_numerics;
        if (params.k == 3) rep.numeric = variance_terms_numeric(params, quad);
        else rep.numeric = AnalyticMoments{mean_khop_numeric(params, quad), std::nullopt, std::nullopt};
    }

    if (params.k == 3 && !results.empty() && results.front().pairs) {
        std::array<std::vector<double>, 5> cls;
        PairStructureMeans pm;
        for (const auto& r : results) {
            const auto& p = *r.pairs;
            cls[0].push_back(static_cast<double>(p.sigma0));
            cls[1].push_back(static_cast<double>(p.sigma11));
            cls[2].push_back(static_cast<double>(p.sigma12));
            cls[3].push_back(static_cast<double>(p.sigma21));
            cls[4].push_back(static_cast<double>(p.sigma22));
            if (p.total() != r.count * r.count || p.sigma21 != r.count) ++pm.identity_violations;
        }
        pm.sigma0 = mean_and_se(cls[0]);
        pm.sigma11 = mean_and_se(cls[1]);
        pm.sigma12 = mean_and_se(cls[2]);
        pm.sigma21 = mean_and_se(cls[3]);
        pm.sigma22 = mean_and_se(cls[4]);
        rep.pair_structure_means = pm;
    }

    rep.existence_brackets = existence_brackets(samples, config.bracket_orders);

    if (auto m = rep.reference_mean()) {
        if (auto v = rep.reference_variance()) {
            rep.theorem4_value = theorem4_bound(*m, *v);
            rep.bonferroni2_value = bonferroni_bound_order2(*m, *v);
        }
    }
    rep.theorem4_empirical = theorem4_bound(rep.empirical.mean, rep.empirical.variance);
    rep.bonferroni2_empirical = bonferroni_bound_order2(rep.empirical.mean, rep.empirical.variance);
    return rep;
}

std::vector<MomentReport> run_experiment(const ExperimentConfig& config, RunOptions options) {
    config.validate();
    std::vector<MomentReport> reports;
    reports.reserve(config.params_grid.size());
    for (std::size_t i = 0; i < config.params_grid.size(); ++i) {
        const auto& params = config.params_grid[i];
        const auto seed = grid_point_seed(config.seed, i);
        const auto results = simulate_point(params, seed, config.replications, options.threads);
        reports.push_back(aggregate(i, params, seed, results, config));
    }
    if (options.write_outputs) write_reports(config, reports);
    return reports;
}

std::string reports_csv(const ExperimentConfig& config, const std::vector<MomentReport>& reports) {
    std::ostringstream os;
    os << "# experiment: " << config.name << "\n"
       << "# replications per grid point: " << config.replications << ", master seed: " << config.seed << "\n"
       << "# sigma_k = number of k-hop paths between anchors x=(0,0) and y=(r,0); r = anchor_distance\n"
       << "# empirical_*: sample statistics over replications; *_se: standard errors\n"
       << "# analytic_mean: (1/k) (rho pi / beta)^(k-1) exp(-beta r^2 / k)  [Rayleigh H = exp(-beta r^2)]\n"
       << "# analytic_variance (k=3): mean + sigma11 + sigma12 + sigma22\n"
       << "# analytic_sigma11: (pi^3 rho^3 / (4 beta^3)) exp(-beta r^2 / 2)\n"
       << "# analytic_sigma12: (pi^3 rho^3 / (6 beta^3)) exp(-3 beta r^2 / 4)\n"
       << "# analytic_sigma21: analytic_mean\n"
       << "# analytic_sigma22: (pi^2 rho^2 / (8 beta^2)) exp(-beta r^2)\n"
       << "# numeric_*: the same quantities from grid-convolution quadrature of the general-H integrals\n"
       << "#   (filled only when no closed form exists)\n"
       << "# pair_*: empirical means of ordered pairs of 3-hop paths by intersection class\n"
       << "# theorem4_value: 1 - [2 E - E^2 - Var] from reference moments; bonferroni2_value: 1.5 E - Var/2 - E^2/2\n"
       << "# *_empirical bounds use the sample mean and variance\n"
       << "# partial_sum_m: sample mean of sum_{i<=m} (-1)^i C(sigma, i); existence_m = 1 - partial_sum_m\n"
       << "# empty cell = not applicable\n";
    os << "grid_index,seed,kind,rho,beta,eta,r0,anchor_distance,k,margin,replications,"
          "empirical_mean,mean_se,empirical_variance,variance_se,dispersion_index,zero_frequency,"
          "zero_frequency_se,max_count,analytic_mean,analytic_variance,analytic_sigma11,analytic_sigma12,"
          "analytic_sigma21,analytic_sigma22,numeric_mean,numeric_variance,numeric_sigma11,numeric_sigma12,"
          "numeric_sigma21,numeric_sigma22,pair_sigma0_mean,pair_sigma0_se,pair_sigma11_mean,pair_sigma11_se,"
          "pair_sigma12_mean,pair_sigma12_se,pair_sigma21_mean,pair_sigma21_se,pair_sigma22_mean,"
          "pair_sigma22_se,pair_identity_violations,theorem4_value,bonferroni2_value,theorem4_empirical,"
          "bonferroni2_empirical";
    for (int m : config.bracket_orders) os << ",partial_sum_" << m << ",existence_" << m;
    os << "\n";

    auto moments_cells = [](std::ostream& o, const std::optional<AnalyticMoments>& a) {
        if (!a) {
            o << ",,,,,,";
            return;
        }
        o << ',' << num(a->mean) << ',' << num(a->variance);
        if (a->terms) {
            o << ',' << num(a->terms->sigma11) << ',' << num(a->terms->sigma12) << ',' << num(a->terms->sigma21)
              << ',' << num(a->terms->sigma22);
        } else {
            o << ",,,,";
        }
    };

    for (const auto& r : reports) {
        const auto& p = r.params;
        const auto& e = r.empirical;
        os << r.grid_index << ',' << r.seed << ',' << to_string(p.connection.kind) << ',' << num(p.rho) << ',';
        if (p.connection.kind == ConnectionKind::Rayleigh) os << num(p.connection.beta) << ',' << num(p.connection.eta);
        else os << ',';
        os << ',';
        if (p.connection.kind == ConnectionKind::HardDisk) os << num(p.connection.r0);
        os << ',' << num(p.anchor_distance) << ',' << p.k << ',' << num(p.margin) << ',' << e.n << ','
           << num(e.mean) << ',' << num(e.mean_se) << ',' << num(e.variance) << ',' << num(e.variance_se) << ','
           << num(e.dispersion_index()) << ',' << num(e.zero_frequency) << ',' << num(e.zero_frequency_se) << ','
           << e.max;
        moments_cells(os, r.analytic);
        moments_cells(os, r.numeric);
        if (r.pair_structure_means) {
            const auto& pm = *r.pair_structure_means;
            for (const auto* m : {&pm.sigma0, &pm.sigma11, &pm.sigma12, &pm.sigma21, &pm.sigma22}) {
                os << ',' << num(m->mean) << ',' << num(m->se);
            }
            os << ',' << pm.identity_violations;
        } else {
            os << ",,,,,,,,,,,";
        }
        os << ',' << num(r.theorem4_value) << ',' << num(r.bonferroni2_value) << ',' << num(r.theorem4_empirical)
           << ',' << num(r.bonferroni2_empirical);
        for (const auto& b : r.existence_brackets) os << ',' << num(b.partial_sum) << ',' << num(b.existence_estimate);
        os << "\n";
    }
    return os.str();
}

std::string histogram_csv(const std::vector<MomentReport>& reports) {
    std::ostringstream os;
    os << "# distribution of sigma_k per grid point as (value, frequency) pairs\n"
       << "# poisson_pmf: Poisson mass at `value` with the reference mean (closed form, else numeric)\n"
       << "grid_index,value,count,frequency,poisson_pmf\n";
    for (const auto& r : reports) {
        const auto lambda = r.reference_mean();
        const double n = static_cast<double>(r.empirical.n);
        for (auto [value, count] : r.histogram) {
            os << r.grid_index << ',' << value << ',' << count << ',' << num(static_cast<double>(count) / n) << ',';
            if (lambda) {
                const double v = static_cast<double>(value);
                double pmf = 0.0;
                if (*lambda > 0.0) pmf = std::exp(v * std::log(*lambda) - *lambda - std::lgamma(v + 1.0));
                else pmf = value == 0 ? 1.0 : 0.0;
                os << num(pmf);
            }
            os << "\n";
        }
    }
    return os.str();
}

json reports_json(const ExperimentConfig& config, const std::vector<MomentReport>& reports) {
    auto moments = [](const std::optional<AnalyticMoments>& a) -> json {
        if (!a) return nullptr;
        json j{{"mean", a->mean}, {"variance", opt(a->variance)}};
        if (a->terms) {
            j["terms"] = {{"sigma11", a->terms->sigma11},
                          {"sigma12", a->terms->sigma12},
                          {"sigma21", a->terms->sigma21},
                          {"sigma22", a->terms->sigma22}};
        } else {
            j["terms"] = nullptr;
        }
        return j;
    };
    json out{{"config", to_json(config)}, {"reports", json::array()}};
    for (const auto& r : reports) {
        const auto& e = r.empirical;
        json j{{"grid_index", r.grid_index},
               {"seed", r.seed},
               {"params", to_json(r.params)},
               {"empirical",
                {{"replications", e.n},
                 {"mean", e.mean},
                 {"mean_se", e.mean_se},
                 {"variance", e.variance},
                 {"variance_se", e.variance_se},
                 {"dispersion_index", e.dispersion_index()},
                 {"zero_frequency", e.zero_frequency},
                 {"zero_frequency_se", e.zero_frequency_se},
                 {"max_count", e.max}}},
               {"analytic", moments(r.analytic)},
               {"numeric", moments(r.numeric)},
               {"theorem4_value", opt(r.theorem4_value)},
               {"bonferroni2_value", opt(r.bonferroni2_value)},
               {"theorem4_empirical", r.theorem4_empirical},
               {"bonferroni2_empirical", r.bonferroni2_empirical}};
        if (r.pair_structure_means) {
            const auto& pm = *r.pair_structure_means;
            auto me = [](const MeanEstimate& m) { return json{{"mean", m.mean}, {"se", m.se}}; };
            j["pair_structure_means"] = {{"sigma0", me(pm.sigma0)},   {"sigma11", me(pm.sigma11)},
                                         {"sigma12", me(pm.sigma12)}, {"sigma21", me(pm.sigma21)},
                                         {"sigma22", me(pm.sigma22)}, {"identity_violations", pm.identity_violations}};
        } else {
            j["pair_structure_means"] = nullptr;
        }
        j["existence_brackets"] = json::array();
        for (const auto& b : r.existence_brackets) {
            j["existence_brackets"].push_back({{"order", b.order},
                                               {"partial_sum", b.partial_sum},
                                               {"side", std::string(to_string(b.side))},
                                               {"existence_estimate", b.existence_estimate}});
        }
        j["histogram"] = json::array();
        for (auto [value, count] : r.histogram) j["histogram"].push_back({value, count});
        if (config.raw_counts) j["raw_counts"] = r.raw_counts;
        out["reports"].push_back(std::move(j));
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace

void write_reports(const ExperimentConfig& config, const std::vector<MomentReport>& reports) {
    std::error_code ec;
    std::filesystem::create_directories(config.outputs, ec);
    if (ec) throw IoError("cannot create output directory " + config.outputs.string() + ": " + ec.message());
    write_file(config.outputs / (config.name + ".csv"), reports_csv(config, reports));
    write_file(config.outputs / (config.name + "_hist.csv"), histogram_csv(reports));
    write_file(config.outputs / (config.name + ".json"), reports_json(config, reports).dump(2) + "\n");
}

std::vector<MarginCheck> validate_margin(const ExperimentConfig& config, std::uint64_t subsample, unsigned threads) {
    config.validate();
    if (subsample < 1) throw ValidationError("validate_margin: subsample must be positive");
    std::vector<MarginCheck> checks;
    for (std::size_t i = 0; i < config.params_grid.size(); ++i) {
        const auto& params = config.params_grid[i];
        ModelParams doubled = params;
        doubled.margin = 2.0 * params.margin;
        const Region inner = sampling_region(params);
        const auto seed = hash_words({grid_point_seed(config.seed, i), 0x6d617267696eULL});

        struct Pair {
            double inner = 0.0;
            double outer = 0.0;
        };
        const auto pairs = parallel_map(subsample, threads, [&](std::size_t rep) {
            const auto points = sample_conditioned_ppp(doubled, seed, rep);
            std::vector<bool> mask(points.size());
            for (std::size_t j = 0; j < points.size(); ++j) mask[j] = inner.contains(points[j]);
            const ReplicationKey key{seed, rep};
            const LazyGraph full(points, params.connection, key);
            const LazyGraph restricted(points, params.connection, key, std::move(mask));
            return Pair{static_cast<double>(count_khop_paths(restricted, params.k).count),
                        static_cast<double>(count_khop_paths(full, params.k).count)};
        });

        std::vector<double> a, b, d;
        for (const auto& p : pairs) {
            a.push_back(p.inner);
            b.push_back(p.outer);
            d.push_back(p.outer - p.inner);
        }
        const auto ma = mean_and_se(a);
        const auto mb = mean_and_se(b);
        const auto md = mean_and_se(d);
        MarginCheck c;
        c.grid_index = i;
        c.margin = params.margin;
        c.replications = subsample;
        c.mean_default = ma.mean;
        c.mean_doubled = mb.mean;
        c.shift = mb.mean - ma.mean;
        c.standard_error = ma.se;
        c.paired_standard_error = md.se;
        c.flagged = c.standard_error > 0.0 ? std::abs(c.shift) > 2.0 * c.standard_error : c.shift != 0.0;
        checks.push_back(c);
    }
    return checks;
}

std::string margin_csv(const std::vector<MarginCheck>& checks) {
    std::ostringstream os;
    os << "# margin doubling check: default-box counts are the restriction of the doubled-box sample\n"
       << "# flagged = |shift| > 2 * standard_error (standard error of the default-box mean)\n"
       << "grid_index,margin,replications,mean_default,mean_doubled,shift,standard_error,paired_standard_error,"
          "flagged\n";
    for (const auto& c : checks) {
        os << c.grid_index << ',' << num(c.margin) << ',' << c.replications << ',' << num(c.mean_default) << ','
           << num(c.mean_doubled) << ',' << num(c.shift) << ',' << num(c.standard_error) << ','
           << num(c.paired_standard_error) << ',' << (c.flagged ? "true" : "false") << "\n";
    }
    return os.str();
}

json sample_dump(const ModelParams& params, std::uint64_t seed, std::uint64_t replication) {
    params.validate();
    auto points = sample_conditioned_ppp(params, seed, replication);
    const auto g = realize_graph(std::move(points), params.connection, seed, replication);
    const Region region = sampling_region(params);
    json pts = json::array();
    for (const auto& p : g.points()) pts.push_back({p.x, p.y});
    json edges = json::array();
    for (auto [u, v] : g.edges()) edges.push_back({u, v});
    const auto paths = list_khop_paths(g, params.k);
    json out{{"params", to_json(params)},
             {"seed", seed},
             {"replication", replication},
             {"region", {{"min", {region.min_corner.x, region.min_corner.y}},
                         {"max", {region.max_corner.x, region.max_corner.y}}}},
             {"anchors", {0, 1}},
             {"points", pts},
             {"edges", edges},
             {"path_count", paths.size()},
             {"paths", paths}};
    if (params.connection.has_closed_form()) {
        out["analytic_mean"] = mean_khop_rayleigh(params);
        if (params.k == 3) out["analytic_variance"] = *variance_threehop_rayleigh(params).variance;
    }
    return out;
}

} // namespace rcm
