#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topotrace/datagen.hpp"
#include "topotrace/geometry.hpp"
#include "topotrace/homology.hpp"
#include "topotrace/mlp.hpp"
#include "topotrace/persistence.hpp"

namespace topo {

/// One evaluated grid point of the (k, eps) search.
struct ScaleEvaluation {
    int k = 0;
    double eps = 0.0;
    std::vector<BettiVector> betti;  // one vector per input cloud
    bool valid = false;
    bool oversize = false;  // complex exceeded the simplex budget
};

struct ScaleSearchResult {
    std::vector<ScaleEvaluation> evaluations;
    std::optional<ScaleParams> chosen;

    std::string to_csv() const;  // k,eps,valid,oversize,betti...
};

/// Two-stage selection: sweep k at eps = 1 until beta_0 matches for every
/// cloud, then sweep eps at a chosen k until the full Betti vector matches.
/// Within a contiguous valid run the middle entry is preferred; if no eps
/// works there, the other stage-1-valid k values are tried by distance from
/// the middle. `chosen` is empty when no (k, eps) pair validates.
ScaleSearchResult select_scale(const std::vector<PointCloud>& clouds,
                               const std::vector<BettiVector>& truths,
                               const std::vector<int>& k_range,
                               const std::vector<double>& eps_range, int dmax,
                               std::size_t budget = kDefaultSimplexBudget);

/// Single-cloud convenience overload.
ScaleSearchResult select_scale(const PointCloud& cloud, const BettiVector& truth,
                               const std::vector<int>& k_range,
                               const std::vector<double>& eps_range, int dmax,
                               std::size_t budget = kDefaultSimplexBudget);

/// knn -> geodesic -> Vietoris-Rips -> Betti at one fixed scale.
BettiVector betti_at_scale(const PointCloud& cloud, const ScaleParams& scale, int dmax,
                           std::size_t budget = kDefaultSimplexBudget);

/// Betti numbers of one class's cloud at every layer of the trace, all at
/// the same fixed (k, eps).
struct TopologyProfile {
    std::uint8_t label = 0;
    ScaleParams scale;
    std::vector<BettiVector> per_layer;  // layers 0..l+1
    std::vector<long> omega;             // sum of Betti entries per layer
};

/// Forwards the homology subsample through the net and computes per-layer
/// homology for each class at the fixed scale. Homology/validation errors
/// are rethrown with (layer, class) context.
std::pair<TopologyProfile, TopologyProfile> track_topology(
    const Mlp& net, const LabeledPointCloud& data,
    const std::vector<std::size_t>& subsample, const ScaleParams& scale, int dmax,
    std::size_t budget = kDefaultSimplexBudget);

/// Per-layer persistence barcodes (for data without ground truth): geodesic
/// filtration over the half-integer grid up to eps_max, then reduction.
std::map<std::size_t, Barcode> track_persistence(
    const Mlp& net, const LabeledPointCloud& data,
    const std::vector<std::size_t>& subsample, std::uint8_t label, int k,
    const std::vector<std::size_t>& layers, int dmax, double eps_max,
    std::size_t budget = kDefaultSimplexBudget);

/// First, middle, final layer of an l-layer net (trace indices 0..l+1).
std::vector<std::size_t> default_persistence_layers(std::size_t layer_count);

struct ExperimentConfig {
    DatasetSpec dataset;
    std::vector<std::size_t> widths;  // full list, input width first, 2 last
    ActivationKind activation = ActivationKind::Relu;
    TrainConfig train;
    std::size_t repetitions = 30;
    std::optional<ScaleParams> fixed_scale;  // skip the search when set
    std::vector<int> k_range;                // default 5..50
    std::vector<double> eps_range;           // default 0.5, 1.0, ..., 8.0
    int dmax = 1;
    std::size_t budget = kDefaultSimplexBudget;
    std::size_t jobs = 1;
    std::uint64_t master_seed = 1;
    std::string report_dir = "report";

    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json() const;
};

std::vector<int> default_k_range();
std::vector<double> default_eps_range();

struct RunRecord {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    bool well_trained = false;
    std::size_t epochs = 0;
    double train_acc = 0.0;
    double test_error = 1.0;
    std::optional<TopologyProfile> profile_a, profile_b;
};

struct ExperimentReport {
    ExperimentConfig config;
    ScaleSearchResult scale_search;
    ScaleParams scale;
    std::vector<RunRecord> runs;

    std::size_t well_trained_count() const;
    /// mean omega per layer for one class over well-trained runs
    std::vector<double> mean_omega(std::uint8_t label) const;
    /// half standard deviation of omega per layer
    std::vector<double> half_std_omega(std::uint8_t label) const;

    std::string profiles_csv() const;   // run,layer,class,beta_0..,omega
    std::string aggregate_csv() const;  // layer,class,mean_omega,half_std_omega
    std::string training_csv() const;   // run,seed,epochs,train_acc,test_error,well_trained
};

/// Full experiment: generate, search scale once, train `repetitions` nets,
/// track topology for every well-trained one, aggregate, and write the
/// report bundle under config.report_dir. Throws TrainingError when no net
/// reaches the well-trained criterion.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes profiles.csv, aggregate.csv, training.csv, scale_search.csv and
/// config.json under dir; timestamps go to a separate metadata.json.
void write_report_bundle(const ExperimentReport& report, const std::string& dir);

struct PcaResult {
    PointCloud projected;
    std::vector<double> explained_variance;
    bool rank_deficient = false;
};

/// Mean-centered projection onto the leading principal directions via
/// power iteration with deflation; deterministic sign convention (largest
/// magnitude coordinate positive). Returns fewer components, flagged, when
/// the covariance rank is lower than requested.
PcaResult pca_project(const PointCloud& cloud, std::size_t components);

}  // namespace topo
