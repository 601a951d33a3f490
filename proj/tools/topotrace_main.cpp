// Command line front end: generate data, train nets, pick the homology
// scale, and track Betti profiles / persistence barcodes across layers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "topotrace/datagen.hpp"
#include "topotrace/errors.hpp"
#include "topotrace/mlp.hpp"
#include "topotrace/pipeline.hpp"

namespace {

topo::Family parse_family(const std::string& s) {
    if (s == "d1") return topo::Family::D1;
    if (s == "d2") return topo::Family::D2;
    if (s == "d3") return topo::Family::D3;
    throw CLI::ValidationError("--family", "expected d1, d2 or d3");
}

topo::BettiVector parse_betti(const std::string& s) {
    topo::BettiVector out;
    std::string token;
    for (char c : s + ",") {
        if (c == ',') {
            if (!token.empty()) out.push_back(std::stol(token));
            token.clear();
        } else {
            token += c;
        }
    }
    if (out.empty()) throw CLI::ValidationError("betti", "expected e.g. 9,0");
    return out;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw topo::IoError("cannot write " + path);
    out << body;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"topology of point clouds across the layers of a classifier"};
    app.require_subcommand(1);

    // gen: synthetic labeled point clouds with known Betti numbers
    auto* gen = app.add_subcommand("gen", "generate a synthetic data set");
    std::string gen_family = "d1", gen_out = "data.csv";
    topo::DatasetSpec gen_spec;
    gen->add_option("--family", gen_family, "d1, d2 or d3");
    gen->add_option("--n-train", gen_spec.n_train, "total points");
    gen->add_option("--seed", gen_spec.seed, "generation seed");
    gen->add_option("--jitter", gen_spec.jitter, "gaussian jitter sigma");
    gen->add_option("--out", gen_out, "output CSV path");

    // train: fit one net on a labeled CSV
    auto* tr = app.add_subcommand("train", "train a classifier on a labeled CSV");
    std::string tr_data, tr_model = "model.txt", tr_metrics, tr_act = "relu";
    std::vector<std::size_t> tr_widths;
    topo::TrainConfig tr_cfg;
    tr->add_option("--data", tr_data, "labeled CSV")->required();
    tr->add_option("--widths", tr_widths, "layer widths, input first, 2 last")
        ->required()
        ->delimiter(',');
    tr->add_option("--activation", tr_act, "tanh, relu or leaky-relu");
    tr->add_option("--lr", tr_cfg.learning_rate, "base learning rate");
    tr->add_option("--decay-eta", tr_cfg.decay_eta, "decay base");
    tr->add_option("--decay-divisor", tr_cfg.decay_divisor, "decay divisor");
    tr->add_option("--max-epochs", tr_cfg.max_epochs, "epoch cap");
    tr->add_option("--batch-size", tr_cfg.batch_size, "0 = full batch");
    tr->add_option("--seed", tr_cfg.seed, "init and split seed");
    tr->add_option("--model-out", tr_model, "model file");
    tr->add_option("--metrics-out", tr_metrics, "per-epoch loss/accuracy CSV");

    // scale-search: find (k, eps) reproducing the known Betti numbers
    auto* ss = app.add_subcommand("scale-search", "search the (k, eps) grid");
    std::string ss_data, ss_truth_a, ss_truth_b, ss_out = "scale_search.csv";
    int ss_kmin = 5, ss_kmax = 50, ss_dmax = 1;
    double ss_emin = 0.5, ss_emax = 8.0, ss_estep = 0.5;
    std::size_t ss_budget = topo::kDefaultSimplexBudget;
    ss->add_option("--data", ss_data, "labeled CSV")->required();
    ss->add_option("--truth-a", ss_truth_a, "class a Betti numbers, e.g. 9,0")
        ->required();
    ss->add_option("--truth-b", ss_truth_b, "class b Betti numbers")->required();
    ss->add_option("--k-min", ss_kmin);
    ss->add_option("--k-max", ss_kmax);
    ss->add_option("--eps-min", ss_emin);
    ss->add_option("--eps-max", ss_emax);
    ss->add_option("--eps-step", ss_estep);
    ss->add_option("--dmax", ss_dmax, "top homology dimension");
    ss->add_option("--budget", ss_budget, "simplex budget");
    ss->add_option("--out", ss_out, "grid CSV");

    // track: Betti numbers of each class at every layer of a trained net
    auto* tk = app.add_subcommand("track", "per-layer Betti numbers of a trained net");
    std::string tk_model, tk_data, tk_out = "profiles.csv";
    int tk_k = 14, tk_dmax = 1;
    double tk_eps = 2.5;
    std::size_t tk_sub = 0, tk_budget = topo::kDefaultSimplexBudget;
    std::uint64_t tk_seed = 1;
    tk->add_option("--model", tk_model, "model file")->required();
    tk->add_option("--data", tk_data, "labeled CSV")->required();
    tk->add_option("--k", tk_k, "neighbor count")->required();
    tk->add_option("--eps", tk_eps, "scale")->required();
    tk->add_option("--dmax", tk_dmax, "top homology dimension");
    tk->add_option("--subsample", tk_sub, "homology subsample size, 0 = all points");
    tk->add_option("--seed", tk_seed, "subsample seed");
    tk->add_option("--budget", tk_budget, "simplex budget");
    tk->add_option("--out", tk_out, "profile CSV");

    // persist: barcodes at selected layers, no ground truth needed
    auto* ps = app.add_subcommand("persist", "persistence barcodes at selected layers");
    std::string ps_model, ps_data, ps_label = "a", ps_dir = "barcodes";
    int ps_k = 14, ps_dmax = 1;
    double ps_emax = 8.0;
    std::vector<std::size_t> ps_layers;
    std::size_t ps_sub = 0, ps_budget = topo::kDefaultSimplexBudget;
    std::uint64_t ps_seed = 1;
    ps->add_option("--model", ps_model, "model file")->required();
    ps->add_option("--data", ps_data, "labeled CSV")->required();
    ps->add_option("--label", ps_label, "class to track, a or b");
    ps->add_option("--k", ps_k, "neighbor count")->required();
    ps->add_option("--eps-max", ps_emax, "filtration end");
    ps->add_option("--layers", ps_layers, "trace indices; default first,middle,last")
        ->delimiter(',');
    ps->add_option("--dmax", ps_dmax, "top homology dimension");
    ps->add_option("--subsample", ps_sub, "subsample size, 0 = all points");
    ps->add_option("--seed", ps_seed, "subsample seed");
    ps->add_option("--budget", ps_budget, "simplex budget");
    ps->add_option("--out-dir", ps_dir, "one CSV per layer is written here");

    // experiment: the full pipeline, many repetitions, report bundle
    auto* ex = app.add_subcommand("experiment", "run the full pipeline from a config");
    std::string ex_config;
    std::optional<std::size_t> ex_reps;
    std::optional<std::uint64_t> ex_seed;
    std::optional<std::string> ex_dir, ex_act, ex_family;
    ex->add_option("--config", ex_config, "JSON config")->required();
    ex->add_option("--repetitions", ex_reps, "override repetitions");
    ex->add_option("--seed", ex_seed, "override master seed");
    ex->add_option("--report-dir", ex_dir, "override report directory");
    ex->add_option("--activation", ex_act, "override activation");
    ex->add_option("--family", ex_family, "override dataset family");

    // pca: project a cloud onto its leading principal directions
    auto* pc = app.add_subcommand("pca", "principal component projection");
    std::string pc_data, pc_out = "pca.csv";
    std::size_t pc_comp = 2;
    pc->add_option("--data", pc_data, "labeled CSV")->required();
    pc->add_option("--components", pc_comp, "component count");
    pc->add_option("--out", pc_out, "projected CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            gen_spec.family = parse_family(gen_family);
            auto data = topo::generate(gen_spec);
            topo::save_csv(data, gen_out);
            std::cout << "wrote " << data.cloud.n << " points in R^" << data.cloud.d
                      << " to " << gen_out << "\n";
        } else if (tr->parsed()) {
            auto data = topo::load_csv(tr_data);
            auto net = topo::Mlp::init(tr_widths,
                                       topo::activation_from_string(tr_act), tr_cfg.seed);
            auto metrics = topo::train(net, data, tr_cfg);
            topo::save_model(net, tr_model);
            if (!tr_metrics.empty()) write_text(tr_metrics, metrics.to_csv());
            std::cout << "epochs " << metrics.epochs_run << ", train acc "
                      << fmt(metrics.final_train_acc) << ", test error "
                      << fmt(metrics.final_test_error)
                      << (metrics.well_trained ? ", well trained" : ", NOT well trained")
                      << "\n";
            if (!metrics.well_trained) return 2;
        } else if (ss->parsed()) {
            auto data = topo::load_csv(ss_data);
            std::vector<int> ks;
            for (int k = ss_kmin; k <= ss_kmax; ++k) ks.push_back(k);
            std::vector<double> eps;
            for (double e = ss_emin; e <= ss_emax + 1e-9; e += ss_estep)
                eps.push_back(e);
            auto result = topo::select_scale(
                {data.class_cloud(0), data.class_cloud(1)},
                {parse_betti(ss_truth_a), parse_betti(ss_truth_b)}, ks, eps, ss_dmax,
                ss_budget);
            write_text(ss_out, result.to_csv());
            if (!result.chosen) {
                std::cerr << "no valid (k, eps); grid written to " << ss_out << "\n";
                return 2;
            }
            std::cout << "k = " << result.chosen->k << ", eps = "
                      << fmt(result.chosen->eps) << " (grid in " << ss_out << ")\n";
        } else if (tk->parsed()) {
            auto net = topo::load_model(tk_model);
            auto data = topo::load_csv(tk_data);
            std::vector<std::size_t> sub;
            if (tk_sub == 0) {
                for (std::size_t i = 0; i < data.cloud.n; ++i) sub.push_back(i);
            } else {
                sub = topo::stratified_subsample(data, tk_sub, tk_seed);
            }
            auto [pa, pb] = topo::track_topology(net, data, sub, {tk_k, tk_eps},
                                                 tk_dmax, tk_budget);
            std::string csv = "layer,class";
            for (int k = 0; k <= tk_dmax; ++k) csv += ",beta_" + std::to_string(k);
            csv += ",omega\n";
            for (const auto* p : {&pa, &pb})
                for (std::size_t layer = 0; layer < p->per_layer.size(); ++layer) {
                    csv += std::to_string(layer) + ",";
                    csv += p->label == 0 ? "a" : "b";
                    for (long b : p->per_layer[layer]) csv += "," + std::to_string(b);
                    csv += "," + std::to_string(p->omega[layer]) + "\n";
                }
            write_text(tk_out, csv);
            std::cout << "wrote " << tk_out << "\n";
        } else if (ps->parsed()) {
            auto net = topo::load_model(ps_model);
            auto data = topo::load_csv(ps_data);
            std::vector<std::size_t> sub;
            if (ps_sub == 0) {
                for (std::size_t i = 0; i < data.cloud.n; ++i) sub.push_back(i);
            } else {
                sub = topo::stratified_subsample(data, ps_sub, ps_seed);
            }
            if (ps_layers.empty())
                ps_layers = topo::default_persistence_layers(net.layer_count());
            std::uint8_t label = ps_label == "b" ? 1 : 0;
            auto barcodes = topo::track_persistence(net, data, sub, label, ps_k,
                                                    ps_layers, ps_dmax, ps_emax,
                                                    ps_budget);
            std::filesystem::create_directories(ps_dir);
            for (const auto& [layer, barcode] : barcodes) {
                auto path = std::filesystem::path(ps_dir) /
                            ("layer_" + std::to_string(layer) + "_" + ps_label + ".csv");
                write_text(path.string(), barcode.to_csv());
            }
            std::cout << "wrote " << barcodes.size() << " barcode files to " << ps_dir
                      << "\n";
        } else if (ex->parsed()) {
            auto cfg = topo::ExperimentConfig::from_json_file(ex_config);
            if (ex_reps) cfg.repetitions = *ex_reps;
            if (ex_seed) cfg.master_seed = *ex_seed;
            if (ex_dir) cfg.report_dir = *ex_dir;
            if (ex_act) cfg.activation = topo::activation_from_string(*ex_act);
            if (ex_family) cfg.dataset.family = parse_family(*ex_family);
            auto report = topo::run_experiment(cfg);
            std::cout << "well trained " << report.well_trained_count() << "/"
                      << cfg.repetitions << " at k = " << report.scale.k << ", eps = "
                      << fmt(report.scale.eps) << "; report in " << cfg.report_dir
                      << "\n";
        } else if (pc->parsed()) {
            auto data = topo::load_csv(pc_data);
            auto result = topo::pca_project(data.cloud, pc_comp);
            topo::LabeledPointCloud projected{result.projected, data.labels,
                                              std::nullopt, std::nullopt};
            topo::save_csv(projected, pc_out);
            if (result.rank_deficient)
                std::cerr << "rank deficient: only " << result.projected.d
                          << " components\n";
            std::cout << "wrote " << pc_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
