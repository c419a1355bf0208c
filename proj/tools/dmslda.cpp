#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dmslda/experiments.hpp"
#include "dmslda/io.hpp"

namespace fs = std::filesystem;
using namespace dmslda;

namespace {

std::vector<std::string> shard_files(const std::string& dir, int machines) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (static_cast<int>(files.size()) < machines)
        throw Error("input dir has " + std::to_string(files.size()) + " csv shards, need " +
                    std::to_string(machines));
    files.resize(machines);
    return files;
}

std::pair<std::string, int> split_host_port(const std::string& endpoint) {
    auto colon = endpoint.rfind(':');
    if (colon == std::string::npos)
        throw Error("endpoint must be host:port, got " + endpoint);
    return {endpoint.substr(0, colon), std::stoi(endpoint.substr(colon + 1))};
}

int run_fit(const std::string& input_dir, int machines, const DmsldaConfig& cfg,
            const std::string& transport, const std::vector<std::string>& worker_endpoints,
            const std::string& out_path) {
    std::vector<std::unique_ptr<WorkerChannel>> channels;
    std::vector<WorkerChannel*> workers;
    ClassSummaries master_summ;

    if (transport == "memory") {
        auto files = shard_files(input_dir, machines);
        master_summ = compute_class_summaries(load_labeled_csv(files[0]));
        for (int m = 1; m < machines; ++m) {
            channels.push_back(in_memory_transport(std::make_shared<WorkerNode>(
                compute_class_summaries(load_labeled_csv(files[m])))));
            workers.push_back(channels.back().get());
        }
    } else if (transport == "tcp") {
        if (static_cast<int>(worker_endpoints.size()) != machines - 1)
            throw Error("tcp transport needs exactly M-1 --workers endpoints");
        auto files = shard_files(input_dir, 1);
        master_summ = compute_class_summaries(load_labeled_csv(files[0]));
        for (const auto& endpoint : worker_endpoints) {
            auto [host, port] = split_host_port(endpoint);
            channels.push_back(tcp_transport(host, port));
            workers.push_back(channels.back().get());
        }
    } else {
        throw Error("unknown transport: " + transport);
    }

    DmsldaResult result = run_dmslda(master_summ, workers, cfg);
    ReducedLdaModel model =
        fit_reduced_lda_distributed(result.chosen, master_summ, workers, result.ledger);
    broadcast_final_model(model, result.chosen_round, workers, result.ledger);
    save_model(model, result.chosen_round, out_path);

    std::cout << "chosen round " << result.chosen_round << ", lambda "
              << result.history[result.chosen_round].lambda << ", validation loss "
              << result.history[result.chosen_round].validation_loss << "\n"
              << "payload bytes " << result.ledger.payload_bytes << " across "
              << result.ledger.messages_sent << " messages\n"
              << "model written to " << out_path << "\n";
    return 0;
}

int run_predict(const std::string& model_path, const std::string& input_path,
                const std::string& out_path) {
    ReducedLdaModel model = load_model(model_path);
    Matrix raw = load_csv_matrix(input_path);
    Eigen::Index d = model.projection.rows();
    Matrix features;
    if (raw.cols() == d)
        features = raw;
    else if (raw.cols() == d + 1)
        features = raw.leftCols(d);  // trailing label column ignored
    else
        throw Error("input has " + std::to_string(raw.cols()) + " columns, model expects " +
                    std::to_string(d));
    IntVector labels = predict_batch(model, features);
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path);
    for (Eigen::Index i = 0; i < labels.size(); ++i) out << labels[i] << '\n';
    std::cout << "wrote " << labels.size() << " labels to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed sparse multicategory linear discriminant analysis"};
    app.require_subcommand(1);

    // fit
    std::string input_dir, transport = "memory", model_out = "model.bin";
    std::vector<std::string> worker_endpoints;
    int machines = 1;
    DmsldaConfig cfg;
    auto* fit = app.add_subcommand("fit", "Run the dmSLDA protocol and write a model");
    fit->add_option("--input", input_dir, "Directory of shard CSV files")->required();
    fit->add_option("--machines", machines, "Number of machines M")->required();
    fit->add_option("--rounds", cfg.rounds, "Communication rounds T");
    fit->add_option("--grid-size", cfg.grid_size, "Round-0 lambda grid size");
    fit->add_option("--grid-ratio", cfg.grid_ratio, "Geometric grid ratio");
    fit->add_option("--transport", transport, "memory or tcp");
    fit->add_option("--workers", worker_endpoints, "host:port of each worker (tcp)")
        ->delimiter(',');
    fit->add_option("--out", model_out, "Output model file");

    // predict
    std::string model_path, predict_input, labels_out = "labels.csv";
    auto* predict = app.add_subcommand("predict", "Classify a CSV of samples");
    predict->add_option("--model", model_path, "Model file from fit")->required();
    predict->add_option("--input", predict_input, "CSV of samples")->required();
    predict->add_option("--out", labels_out, "Output label file");

    // experiment
    std::string family = "multiclass", scale = "desk", results_out = "results.csv";
    uint64_t seed = 1;
    auto* experiment = app.add_subcommand("experiment", "Run the synthetic study sweep");
    experiment->add_option("--family", family, "multiclass or binary");
    experiment->add_option("--scale", scale, "desk or paper");
    experiment->add_option("--seed", seed, "Master seed");
    experiment->add_option("--out", results_out, "Output CSV");

    // serve-worker
    std::string listen_endpoint, shard_path;
    auto* serve = app.add_subcommand("serve-worker", "Serve one shard over TCP");
    serve->add_option("--listen", listen_endpoint, "host:port to listen on")->required();
    serve->add_option("--shard", shard_path, "Shard CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed())
            return run_fit(input_dir, machines, cfg, transport, worker_endpoints, model_out);
        if (predict->parsed()) return run_predict(model_path, predict_input, labels_out);
        if (experiment->parsed()) {
            Family fam = family == "binary" ? Family::Binary : Family::Multiclass;
            std::string csv = run_sweep(sweep_settings(fam, scale == "paper", seed));
            write_text_file(results_out, csv);
            std::cout << "results written to " << results_out << "\n";
            return 0;
        }
        if (serve->parsed()) {
            auto [host, port] = split_host_port(listen_endpoint);
            WorkerNode node(compute_class_summaries(load_labeled_csv(shard_path)));
            serve_worker_tcp(node, host, port);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
