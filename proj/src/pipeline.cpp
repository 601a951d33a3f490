#include "topotrace/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "topotrace/errors.hpp"
#include "topotrace/rips.hpp"

namespace topo {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 on a per-stream offset; independent streams per run
    std::uint64_t z = master + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

BettiVector fit_length(const BettiVector& v, std::size_t len) {
    BettiVector out(len, 0);
    for (std::size_t i = 0; i < std::min(len, v.size()); ++i) out[i] = v[i];
    return out;
}

/// Middle index of the longest contiguous true-run; first run wins ties.
std::optional<std::size_t> middle_of_longest_run(const std::vector<bool>& valid) {
    std::size_t best_start = 0, best_len = 0;
    std::size_t i = 0;
    while (i < valid.size()) {
        if (!valid[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < valid.size() && valid[j]) ++j;
        if (j - i > best_len) {
            best_len = j - i;
            best_start = i;
        }
        i = j;
    }
    if (best_len == 0) return std::nullopt;
    return best_start + (best_len - 1) / 2;
}

}  // namespace

std::string ScaleSearchResult::to_csv() const {
    std::string out = "k,eps,valid,oversize,betti\n";
    for (const auto& e : evaluations) {
        out += std::to_string(e.k) + "," + fmt(e.eps) + ",";
        out += e.valid ? "1," : "0,";
        out += e.oversize ? "1," : "0,";
        for (std::size_t c = 0; c < e.betti.size(); ++c) {
            if (c) out += "|";
            for (std::size_t i = 0; i < e.betti[c].size(); ++i) {
                if (i) out += ";";
                out += std::to_string(e.betti[c][i]);
            }
        }
        out += "\n";
    }
    return out;
}

BettiVector betti_at_scale(const PointCloud& cloud, const ScaleParams& scale, int dmax,
                           std::size_t budget) {
    auto graph = knn_graph(cloud, scale.k);
    auto dist = geodesic_distances(graph);
    auto complex = vietoris_rips(dist, scale.eps, dmax, budget);
    return betti_numbers(complex, dmax);
}

ScaleSearchResult select_scale(const std::vector<PointCloud>& clouds,
                               const std::vector<BettiVector>& truths,
                               const std::vector<int>& k_range,
                               const std::vector<double>& eps_range, int dmax,
                               std::size_t budget) {
    if (clouds.empty() || clouds.size() != truths.size())
        throw ParamError("select_scale: clouds and truths must be non-empty and match");
    if (k_range.empty() || eps_range.empty())
        throw ParamError("select_scale: empty search grid");
    if (dmax < 0) throw ParamError("select_scale: dmax must be >= 0");

    std::vector<BettiVector> want;
    want.reserve(truths.size());
    for (const auto& t : truths) want.push_back(fit_length(t, dmax + 1));

    ScaleSearchResult result;

    // stage 1: match beta_0 of every cloud at eps = 1
    std::vector<bool> k_valid(k_range.size(), false);
    for (std::size_t ki = 0; ki < k_range.size(); ++ki) {
        int k = k_range[ki];
        ScaleEvaluation eval;
        eval.k = k;
        eval.eps = 1.0;
        bool usable = true;
        for (const auto& cloud : clouds)
            if (k < 1 || static_cast<std::size_t>(k) >= cloud.n) usable = false;
        if (usable) {
            bool all_match = true;
            for (std::size_t c = 0; c < clouds.size(); ++c) {
                auto dist = geodesic_distances(knn_graph(clouds[c], k));
                long b0 = threshold_components(dist, 1.0);
                eval.betti.push_back({b0});
                if (b0 != want[c][0]) all_match = false;
            }
            eval.valid = all_match;
        }
        k_valid[ki] = eval.valid;
        result.evaluations.push_back(std::move(eval));
    }
    auto k_pick = middle_of_longest_run(k_valid);
    if (!k_pick) return result;

    // stage-2 candidates: the middle of the longest stage-1 run first, then
    // the other stage-1-valid k values by distance from it
    std::vector<std::size_t> candidates{*k_pick};
    for (std::size_t step = 1; step < k_range.size(); ++step)
        for (long sign : {1L, -1L}) {
            long ki = static_cast<long>(*k_pick) + sign * static_cast<long>(step);
            if (ki >= 0 && ki < static_cast<long>(k_range.size()) && k_valid[ki])
                candidates.push_back(static_cast<std::size_t>(ki));
        }

    for (std::size_t ki : candidates) {
        int k_star = k_range[ki];
        std::vector<GeodesicDistances> dists;
        dists.reserve(clouds.size());
        for (const auto& cloud : clouds)
            dists.push_back(geodesic_distances(knn_graph(cloud, k_star)));

        // stage 2: match the full Betti vector at k = k_star; the complex is
        // monotone in eps, so the first budget overflow ends the sweep
        std::vector<bool> eps_valid(eps_range.size(), false);
        std::vector<double> eps_seen;
        for (std::size_t ei = 0; ei < eps_range.size(); ++ei) {
            double eps = eps_range[ei];
            ScaleEvaluation eval;
            eval.k = k_star;
            eval.eps = eps;
            bool all_match = true;
            try {
                for (std::size_t c = 0; c < clouds.size(); ++c) {
                    auto complex = vietoris_rips(dists[c], eps, dmax, budget);
                    auto betti = betti_numbers(complex, dmax);
                    if (betti != want[c]) all_match = false;
                    eval.betti.push_back(std::move(betti));
                }
                eval.valid = all_match;
            } catch (const BudgetExceeded&) {
                eval.oversize = true;
            }
            bool oversize = eval.oversize;
            eps_valid[ei] = eval.valid;
            eps_seen.push_back(eps);
            result.evaluations.push_back(std::move(eval));
            if (oversize) break;
        }
        auto e_pick = middle_of_longest_run(eps_valid);
        if (!e_pick) continue;  // no eps works at this k, try the next one

        result.chosen = ScaleParams{k_star, eps_seen[*e_pick]};
        break;
    }
    return result;
}

ScaleSearchResult select_scale(const PointCloud& cloud, const BettiVector& truth,
                               const std::vector<int>& k_range,
                               const std::vector<double>& eps_range, int dmax,
                               std::size_t budget) {
    return select_scale(std::vector<PointCloud>{cloud},
                        std::vector<BettiVector>{truth}, k_range, eps_range, dmax,
                        budget);
}

std::vector<int> default_k_range() {
    std::vector<int> ks;
    for (int k = 5; k <= 50; ++k) ks.push_back(k);
    return ks;
}

std::vector<double> default_eps_range() {
    std::vector<double> eps;
    for (int i = 1; i <= 16; ++i) eps.push_back(0.5 * i);
    return eps;
}

std::pair<TopologyProfile, TopologyProfile> track_topology(
    const Mlp& net, const LabeledPointCloud& data,
    const std::vector<std::size_t>& subsample, const ScaleParams& scale, int dmax,
    std::size_t budget) {
    if (subsample.empty()) throw ParamError("track_topology: empty subsample");
    PointCloud input = data.cloud.select(subsample);
    std::vector<std::size_t> idx_a, idx_b;
    for (std::size_t i = 0; i < subsample.size(); ++i) {
        if (subsample[i] >= data.labels.size())
            throw ParamError("track_topology: subsample index out of range");
        (data.labels[subsample[i]] == 0 ? idx_a : idx_b).push_back(i);
    }
    if (idx_a.empty() || idx_b.empty())
        throw ParamError("track_topology: subsample must contain both classes");

    LayerTrace trace = forward_trace(net, input);

    TopologyProfile prof_a, prof_b;
    prof_a.label = 0;
    prof_b.label = 1;
    prof_a.scale = prof_b.scale = scale;
    for (std::size_t layer = 0; layer < trace.layers.size(); ++layer) {
        for (auto* prof : {&prof_a, &prof_b}) {
            const auto& idx = prof->label == 0 ? idx_a : idx_b;
            try {
                auto betti =
                    betti_at_scale(trace.layers[layer].select(idx), scale, dmax, budget);
                prof->omega.push_back(topological_complexity(betti));
                prof->per_layer.push_back(std::move(betti));
            } catch (const std::exception& e) {
                throw ValidationError("track_topology: layer " + std::to_string(layer) +
                                      ", class " + (prof->label == 0 ? "a" : "b") +
                                      ": " + e.what());
            }
        }
    }
    return {std::move(prof_a), std::move(prof_b)};
}

std::vector<std::size_t> default_persistence_layers(std::size_t layer_count) {
    std::size_t last = layer_count + 1;  // trace indices run 0..l+1
    std::vector<std::size_t> layers{0, last / 2, last};
    layers.erase(std::unique(layers.begin(), layers.end()), layers.end());
    return layers;
}

std::map<std::size_t, Barcode> track_persistence(
    const Mlp& net, const LabeledPointCloud& data,
    const std::vector<std::size_t>& subsample, std::uint8_t label, int k,
    const std::vector<std::size_t>& layers, int dmax, double eps_max,
    std::size_t budget) {
    if (subsample.empty()) throw ParamError("track_persistence: empty subsample");
    PointCloud input = data.cloud.select(subsample);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < subsample.size(); ++i)
        if (data.labels[subsample[i]] == label) idx.push_back(i);
    if (idx.empty()) throw ParamError("track_persistence: no points with that label");

    LayerTrace trace = forward_trace(net, input);
    auto scales = half_integer_grid(eps_max);

    std::map<std::size_t, Barcode> out;
    for (std::size_t layer : layers) {
        if (layer >= trace.layers.size())
            throw ParamError("track_persistence: layer " + std::to_string(layer) +
                             " out of range");
        PointCloud cloud = trace.layers[layer].select(idx);
        auto dist = geodesic_distances(knn_graph(cloud, k));
        auto filtration = build_filtration(dist, scales, dmax, budget);
        out.emplace(layer, reduce(filtration));
    }
    return out;
}

namespace {

Family family_from_string(const std::string& s) {
    if (s == "d1") return Family::D1;
    if (s == "d2") return Family::D2;
    if (s == "d3") return Family::D3;
    throw ParseError("unknown dataset family: " + s);
}

std::string family_to_string(Family f) {
    switch (f) {
        case Family::D1: return "d1";
        case Family::D2: return "d2";
        case Family::D3: return "d3";
        case Family::Csv: return "csv";
    }
    return "d1";
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path + ": " + e.what());
    }

    ExperimentConfig cfg;
    try {
        if (j.contains("dataset")) {
            const auto& d = j["dataset"];
            if (d.contains("family"))
                cfg.dataset.family = family_from_string(d["family"].get<std::string>());
            if (d.contains("n_train")) cfg.dataset.n_train = d["n_train"].get<std::size_t>();
            if (d.contains("n_homology"))
                cfg.dataset.n_homology = d["n_homology"].get<std::size_t>();
            if (d.contains("seed")) cfg.dataset.seed = d["seed"].get<std::uint64_t>();
            if (d.contains("jitter")) cfg.dataset.jitter = d["jitter"].get<double>();
        }
        if (j.contains("widths")) cfg.widths = j["widths"].get<std::vector<std::size_t>>();
        if (j.contains("activation"))
            cfg.activation = activation_from_string(j["activation"].get<std::string>());
        if (j.contains("train")) {
            const auto& t = j["train"];
            if (t.contains("learning_rate"))
                cfg.train.learning_rate = t["learning_rate"].get<double>();
            if (t.contains("decay_eta")) cfg.train.decay_eta = t["decay_eta"].get<double>();
            if (t.contains("decay_divisor"))
                cfg.train.decay_divisor = t["decay_divisor"].get<double>();
            if (t.contains("max_epochs"))
                cfg.train.max_epochs = t["max_epochs"].get<std::size_t>();
            if (t.contains("batch_size"))
                cfg.train.batch_size = t["batch_size"].get<std::size_t>();
            if (t.contains("test_fraction"))
                cfg.train.test_fraction = t["test_fraction"].get<double>();
            if (t.contains("test_error_threshold"))
                cfg.train.test_error_threshold = t["test_error_threshold"].get<double>();
            if (t.contains("patience"))
                cfg.train.patience = t["patience"].get<std::size_t>();
        }
        if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<std::size_t>();
        if (j.contains("fixed_scale")) {
            ScaleParams s;
            s.k = j["fixed_scale"]["k"].get<int>();
            s.eps = j["fixed_scale"]["eps"].get<double>();
            cfg.fixed_scale = s;
        }
        if (j.contains("k_range")) {
            int lo = j["k_range"]["min"].get<int>();
            int hi = j["k_range"]["max"].get<int>();
            if (lo < 1 || hi < lo) throw ParseError("config: bad k_range");
            cfg.k_range.clear();
            for (int k = lo; k <= hi; ++k) cfg.k_range.push_back(k);
        }
        if (j.contains("eps_range")) {
            double lo = j["eps_range"]["min"].get<double>();
            double hi = j["eps_range"]["max"].get<double>();
            double step = j["eps_range"].value("step", 0.5);
            if (step <= 0 || hi < lo) throw ParseError("config: bad eps_range");
            cfg.eps_range.clear();
            for (double e = lo; e <= hi + 1e-9; e += step) cfg.eps_range.push_back(e);
        }
        if (j.contains("dmax")) cfg.dmax = j["dmax"].get<int>();
        if (j.contains("budget")) cfg.budget = j["budget"].get<std::size_t>();
        if (j.contains("jobs")) cfg.jobs = j["jobs"].get<std::size_t>();
        if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("report_dir")) cfg.report_dir = j["report_dir"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path + ": " + e.what());
    }
    return cfg;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["dataset"] = {{"family", family_to_string(dataset.family)},
                    {"n_train", dataset.n_train},
                    {"n_homology", dataset.n_homology},
                    {"seed", dataset.seed},
                    {"jitter", dataset.jitter}};
    j["widths"] = widths;
    j["activation"] = to_string(activation);
    j["train"] = {{"learning_rate", train.learning_rate},
                  {"decay_eta", train.decay_eta},
                  {"decay_divisor", train.decay_divisor},
                  {"max_epochs", train.max_epochs},
                  {"batch_size", train.batch_size},
                  {"test_fraction", train.test_fraction},
                  {"test_error_threshold", train.test_error_threshold},
                  {"patience", train.patience}};
    j["repetitions"] = repetitions;
    if (fixed_scale) j["fixed_scale"] = {{"k", fixed_scale->k}, {"eps", fixed_scale->eps}};
    if (!k_range.empty())
        j["k_range"] = {{"min", k_range.front()}, {"max", k_range.back()}};
    if (!eps_range.empty())
        j["eps_range"] = {{"min", eps_range.front()},
                          {"max", eps_range.back()},
                          {"step", eps_range.size() > 1 ? eps_range[1] - eps_range[0]
                                                        : 0.5}};
    j["dmax"] = dmax;
    j["budget"] = budget;
    j["jobs"] = jobs;
    j["master_seed"] = master_seed;
    j["report_dir"] = report_dir;
    return j.dump(2) + "\n";
}

std::size_t ExperimentReport::well_trained_count() const {
    std::size_t n = 0;
    for (const auto& r : runs)
        if (r.well_trained) ++n;
    return n;
}

std::vector<double> ExperimentReport::mean_omega(std::uint8_t label) const {
    std::vector<double> mean;
    std::size_t n = 0;
    for (const auto& r : runs) {
        const auto& prof = label == 0 ? r.profile_a : r.profile_b;
        if (!r.well_trained || !prof) continue;
        if (mean.empty()) mean.assign(prof->omega.size(), 0.0);
        for (std::size_t i = 0; i < prof->omega.size(); ++i)
            mean[i] += static_cast<double>(prof->omega[i]);
        ++n;
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    return mean;
}

std::vector<double> ExperimentReport::half_std_omega(std::uint8_t label) const {
    auto mean = mean_omega(label);
    std::vector<double> acc(mean.size(), 0.0);
    std::size_t n = 0;
    for (const auto& r : runs) {
        const auto& prof = label == 0 ? r.profile_a : r.profile_b;
        if (!r.well_trained || !prof) continue;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            double d = static_cast<double>(prof->omega[i]) - mean[i];
            acc[i] += d * d;
        }
        ++n;
    }
    for (auto& a : acc) a = n > 1 ? 0.5 * std::sqrt(a / static_cast<double>(n - 1)) : 0.0;
    return acc;
}

std::string ExperimentReport::profiles_csv() const {
    std::string out = "run,layer,class";
    for (int k = 0; k <= config.dmax; ++k) out += ",beta_" + std::to_string(k);
    out += ",omega\n";
    for (const auto& r : runs) {
        if (!r.well_trained) continue;
        for (const auto* prof : {&r.profile_a, &r.profile_b}) {
            if (!prof->has_value()) continue;
            const auto& p = prof->value();
            for (std::size_t layer = 0; layer < p.per_layer.size(); ++layer) {
                out += std::to_string(r.run) + "," + std::to_string(layer) + ",";
                out += p.label == 0 ? "a" : "b";
                for (long b : p.per_layer[layer]) out += "," + std::to_string(b);
                out += "," + std::to_string(p.omega[layer]) + "\n";
            }
        }
    }
    return out;
}

std::string ExperimentReport::aggregate_csv() const {
    std::string out = "layer,class,mean_omega,half_std_omega\n";
    for (std::uint8_t label : {std::uint8_t{0}, std::uint8_t{1}}) {
        auto mean = mean_omega(label);
        auto half = half_std_omega(label);
        for (std::size_t layer = 0; layer < mean.size(); ++layer) {
            out += std::to_string(layer) + ",";
            out += label == 0 ? "a," : "b,";
            out += fmt(mean[layer]) + "," + fmt(half[layer]) + "\n";
        }
    }
    return out;
}

std::string ExperimentReport::training_csv() const {
    std::string out = "run,seed,epochs,train_acc,test_error,well_trained\n";
    for (const auto& r : runs) {
        out += std::to_string(r.run) + "," + std::to_string(r.seed) + "," +
               std::to_string(r.epochs) + "," + fmt(r.train_acc) + "," +
               fmt(r.test_error) + "," + (r.well_trained ? "1" : "0") + "\n";
    }
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.repetitions == 0) throw ParamError("run_experiment: repetitions must be >= 1");
    if (cfg.widths.size() < 2 || cfg.widths.back() != 2)
        throw ParamError("run_experiment: widths must end with the 2 output units");

    ExperimentConfig config = cfg;
    if (config.k_range.empty()) config.k_range = default_k_range();
    if (config.eps_range.empty()) config.eps_range = default_eps_range();

    LabeledPointCloud data = generate(config.dataset);
    if (data.cloud.d != config.widths.front())
        throw ParamError("run_experiment: input width " +
                         std::to_string(config.widths.front()) +
                         " does not match data dimension " + std::to_string(data.cloud.d));

    auto subsample = stratified_subsample(data, config.dataset.n_homology,
                                          derive_seed(config.master_seed, 0));

    ExperimentReport report;
    report.config = config;

    if (config.fixed_scale) {
        report.scale = *config.fixed_scale;
    } else {
        PointCloud sub = data.cloud.select(subsample);
        std::vector<std::uint8_t> sub_labels;
        for (auto i : subsample) sub_labels.push_back(data.labels[i]);
        LabeledPointCloud subdata{std::move(sub), std::move(sub_labels), data.truth_a,
                                  data.truth_b};
        report.scale_search = select_scale(
            {subdata.class_cloud(0), subdata.class_cloud(1)},
            {data.truth_a.value(), data.truth_b.value()}, config.k_range,
            config.eps_range, config.dmax, config.budget);
        if (!report.scale_search.chosen)
            throw ValidationError(
                "run_experiment: scale search found no (k, eps) matching the ground "
                "truth; see scale_search.csv");
        report.scale = *report.scale_search.chosen;
    }

    report.runs.resize(config.repetitions);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            std::size_t r = next.fetch_add(1);
            if (r >= config.repetitions) return;
            try {
                RunRecord rec;
                rec.run = r;
                rec.seed = derive_seed(config.master_seed, r + 1);
                Mlp net = Mlp::init(config.widths, config.activation, rec.seed);
                TrainConfig tc = config.train;
                tc.seed = rec.seed;
                TrainMetrics metrics = train(net, data, tc);
                rec.epochs = metrics.epochs_run;
                rec.train_acc = metrics.final_train_acc;
                rec.test_error = metrics.final_test_error;
                rec.well_trained = metrics.well_trained;
                if (rec.well_trained) {
                    auto [pa, pb] = track_topology(net, data, subsample, report.scale,
                                                   config.dmax, config.budget);
                    rec.profile_a = std::move(pa);
                    rec.profile_b = std::move(pb);
                }
                report.runs[r] = std::move(rec);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::size_t jobs = std::max<std::size_t>(1, config.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    if (report.well_trained_count() == 0)
        throw TrainingError("run_experiment: none of " +
                            std::to_string(config.repetitions) +
                            " runs reached the well-trained criterion");

    write_report_bundle(report, config.report_dir);
    return report;
}

void write_report_bundle(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "barcodes", ec);
    fs::create_directories(fs::path(dir) / "pca", ec);
    if (ec) throw IoError("cannot create report directory: " + dir);

    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw IoError("cannot write " + name + " under " + dir);
        out << body;
    };
    write("profiles.csv", report.profiles_csv());
    write("aggregate.csv", report.aggregate_csv());
    write("training.csv", report.training_csv());
    write("scale_search.csv", report.scale_search.to_csv());
    write("config.json", report.config.to_json());

    // timestamps live here so the CSV outputs stay reproducible
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    nlohmann::ordered_json meta;
    meta["written_at"] = stamp;
    meta["well_trained_runs"] = report.well_trained_count();
    meta["scale"] = {{"k", report.scale.k}, {"eps", report.scale.eps}};
    write("metadata.json", meta.dump(2) + "\n");
}

PcaResult pca_project(const PointCloud& cloud, std::size_t components) {
    if (cloud.n == 0 || cloud.d == 0) throw ParamError("pca_project: empty cloud");
    if (components == 0) throw ParamError("pca_project: components must be >= 1");
    components = std::min(components, cloud.d);

    std::size_t n = cloud.n, d = cloud.d;
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += cloud.coords[i * d + j];
    for (auto& m : mean) m /= static_cast<double>(n);

    std::vector<double> centered(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            centered[i * d + j] = cloud.coords[i * d + j] - mean[j];

    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a; b < d; ++b)
                cov[a * d + b] += centered[i * d + a] * centered[i * d + b];
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            cov[a * d + b] /= static_cast<double>(n);
            cov[b * d + a] = cov[a * d + b];
        }

    double trace = 0.0;
    for (std::size_t a = 0; a < d; ++a) trace += cov[a * d + a];
    double tol = 1e-10 * std::max(trace, 1.0);

    PcaResult result;
    std::vector<std::vector<double>> dirs;
    for (std::size_t c = 0; c < components; ++c) {
        std::vector<double> v(d, 0.0);
        v[c % d] = 1.0;  // deterministic start
        double lambda = 0.0;
        for (int iter = 0; iter < 1000; ++iter) {
            std::vector<double> w(d, 0.0);
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) w[a] += cov[a * d + b] * v[b];
            double norm = 0.0;
            for (double x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < tol) {
                lambda = 0.0;
                break;
            }
            for (auto& x : w) x /= norm;
            double diff = 0.0;
            for (std::size_t a = 0; a < d; ++a) diff += std::abs(w[a] - v[a]);
            double flip = 0.0;
            for (std::size_t a = 0; a < d; ++a) flip += std::abs(w[a] + v[a]);
            v = std::move(w);
            lambda = norm;
            if (std::min(diff, flip) < 1e-13) break;
        }
        if (lambda <= tol) {
            result.rank_deficient = true;
            break;
        }
        // sign convention: largest-magnitude coordinate positive
        std::size_t arg = 0;
        for (std::size_t a = 1; a < d; ++a)
            if (std::abs(v[a]) > std::abs(v[arg])) arg = a;
        if (v[arg] < 0)
            for (auto& x : v) x = -x;
        result.explained_variance.push_back(lambda);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) cov[a * d + b] -= lambda * v[a] * v[b];
        dirs.push_back(std::move(v));
    }
    if (dirs.empty()) throw ParamError("pca_project: covariance has rank zero");

    result.projected = PointCloud(n, dirs.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < dirs.size(); ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += centered[i * d + j] * dirs[c][j];
            result.projected.coords[i * dirs.size() + c] = s;
        }
    return result;
}

}  // namespace topo
