#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rcm/analytics.hpp"
#include "rcm/model.hpp"
#include "rcm/moments.hpp"
#include "rcm/path_enum.hpp"

namespace rcm {

struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<ModelParams> params_grid;
    std::uint64_t replications = 1000;
    std::uint64_t seed = 1;
    std::filesystem::path outputs = "out";
    bool strict_numerics = false;
    std::vector<int> bracket_orders{0, 1, 2, 3, 4, 5, 80};
    bool raw_counts = false; // include per-replication counts in the JSON report

    // Throws ValidationError naming every offending field.
    void validate() const;
};

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const ExperimentConfig& c);

// Parses a config document. Missing margins take the default policy.
// Throws ValidationError listing every offending field.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

// Built-in sweeps: fig-example, fig-mean-var, fig-distribution, fig-existence.
std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name, double anchor_distance = 1.0);

// Seed used for the replications of grid point `index`.
std::uint64_t grid_point_seed(std::uint64_t master_seed, std::size_t index);

// One replication: sigma_k and, for k = 3, the pair-structure counts.
struct ReplicationResult {
    std::uint64_t count = 0;
    std::optional<PairStructureCounts> pairs;
};

ReplicationResult simulate_replication(const ModelParams& params, std::uint64_t seed, std::uint64_t replication);

std::vector<ReplicationResult> simulate_point(const ModelParams& params, std::uint64_t seed,
                                              std::uint64_t replications, unsigned threads);

struct PairStructureMeans {
    MeanEstimate sigma0, sigma11, sigma12, sigma21, sigma22;
    std::uint64_t identity_violations = 0; // replications where the classes do not sum to sigma^2
};

struct MomentReport {
    std::size_t grid_index = 0;
    ModelParams params;
    std::uint64_t seed = 0;
    SampleSummary empirical;
    std::optional<AnalyticMoments> analytic; // closed forms (Rayleigh, eta = 2)
    std::optional<AnalyticMoments> numeric;  // general-H quadrature when no closed form
    std::optional<PairStructureMeans> pair_structure_means;
    std::vector<ExistenceBracket> existence_brackets;
    std::optional<double> theorem4_value;    // from reference moments
    std::optional<double> bonferroni2_value; // from reference moments
    double theorem4_empirical = 0.0;
    double bonferroni2_empirical = 0.0;
    std::map<std::uint64_t, std::uint64_t> histogram;
    std::vector<std::uint64_t> raw_counts; // filled only when requested

    // Analytic mean when available, else the numeric one.
    std::optional<double> reference_mean() const;
    std::optional<double> reference_variance() const;
};

MomentReport aggregate(std::size_t grid_index, const ModelParams& params, std::uint64_t seed,
                       const std::vector<ReplicationResult>& results, const ExperimentConfig& config);

struct RunOptions {
    unsigned threads = 1;
    bool write_outputs = true;
};

std::vector<MomentReport> run_experiment(const ExperimentConfig& config, RunOptions options = {});

// Output documents. Byte-identical for identical configs.
std::string reports_csv(const ExperimentConfig& config, const std::vector<MomentReport>& reports);
std::string histogram_csv(const std::vector<MomentReport>& reports);
nlohmann::json reports_json(const ExperimentConfig& config, const std::vector<MomentReport>& reports);

// Writes <name>.csv, <name>_hist.csv and <name>.json; throws IoError.
void write_reports(const ExperimentConfig& config, const std::vector<MomentReport>& reports);

struct MarginCheck {
    std::size_t grid_index = 0;
    double margin = 0.0;
    std::uint64_t replications = 0;
    double mean_default = 0.0; // sigma_k restricted to the default box
    double mean_doubled = 0.0; // sigma_k on the doubled box
    double shift = 0.0;        // doubled - default
    double standard_error = 0.0; // of the default-box mean
    double paired_standard_error = 0.0;
    bool flagged = false; // |shift| > 2 standard errors
};

// Reruns each grid point with the margin doubled. Each replication samples the
// doubled box once; the default-margin realization is its restriction to the
// default box with identical edge draws, so the shift isolates truncation.
std::vector<MarginCheck> validate_margin(const ExperimentConfig& config, std::uint64_t subsample = 1000,
                                         unsigned threads = 1);

std::string margin_csv(const std::vector<MarginCheck>& checks);

// One realization with its edges and k-hop paths, for inspection.
nlohmann::json sample_dump(const ModelParams& params, std::uint64_t seed, std::uint64_t replication);

} // namespace rcm
