// gwtk: channel-tensor compression experiments from the command line.
//
// Verb chain for one experiment: generate (inspect the synthetic set),
// compress (solve + persist the archive), evaluate (both SINR pipelines +
// report files), sweep (rank sweeps), report (render stored results).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gwtucker/runner.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> model;
    std::optional<std::string> ranks;  // "m,n,p"
    std::optional<int> iters;
    std::optional<std::string> out;
    bool storage_only = false;
};

void add_common(CLI::App* cmd, CliOverrides& o, bool with_storage_only = false) {
    cmd->add_option("--config", o.config_path, "experiment config file")->required();
    cmd->add_option("--seed", o.seed, "override the config seed");
    cmd->add_option("--model", o.model, "override the model (individual|shared|groupwise)");
    cmd->add_option("--ranks", o.ranks, "override the ranks as m,n,p");
    cmd->add_option("--iters", o.iters, "override the sweep count S");
    cmd->add_option("--out", o.out, "override the output directory");
    if (with_storage_only)
        cmd->add_flag("--storage-only", o.storage_only,
                      "skip generation and pipelines; compute R_s from the formulas");
}

gwt::ExperimentConfig resolve_config(const CliOverrides& o) {
    gwt::ExperimentConfig cfg = gwt::load_config(o.config_path);
    if (const char* env_out = std::getenv("GWTK_OUT"); env_out && *env_out)
        cfg.out_dir = env_out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.model) cfg.model = gwt::model_from_name(*o.model);
    if (o.iters) cfg.iters = *o.iters;
    if (o.out) cfg.out_dir = *o.out;
    if (o.ranks) {
        int m = 0, n = 0, p = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(*o.ranks);
        if (!(ss >> m >> c1 >> n >> c2 >> p) || c1 != ',' || c2 != ',' || !(ss >> std::ws).eof())
            throw std::invalid_argument("--ranks expects m,n,p (e.g. 4,6,5), got '" + *o.ranks + "'");
        cfg.ranks = {m, n, p};
    }
    return cfg;
}

int cmd_generate(const CliOverrides& o) {
    gwt::ExperimentConfig cfg = resolve_config(o);
    cfg.validate();
    gwt::ChannelSet set = gwt::generate_channel_set(cfg.topology, cfg.generator, cfg.seed);
    std::cout << "generated " << set.tensors.size() << " channel tensors of size ("
              << cfg.topology.rx_antennas << "," << cfg.topology.tx_antennas << ","
              << cfg.topology.num_taps << ")\n";
    std::cout << "total energy " << set.total_squared_norm() << "\n";
    const gwt::Tensor3& x = set.tensor(0, 0, 0);
    std::cout << "link (0,0,0) per-tap energy:";
    for (int l = 0; l < x.dim3(); ++l)
        std::cout << " " << x.slice_view(l).squaredNorm();
    std::cout << "\n";
    return 0;
}

int cmd_compress(const CliOverrides& o) {
    gwt::ExperimentConfig cfg = resolve_config(o);
    cfg.validate();
    gwt::ChannelSet set = gwt::generate_channel_set(cfg.topology, cfg.generator, cfg.seed);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string archive_path = (std::filesystem::path(cfg.out_dir) / "compressed.gwtk").string();

    gwt::SolveTrace trace;
    if (cfg.model == gwt::ModelKind::individual) {
        gwt::IndividualResult r = gwt::individual_solve(set, cfg.ranks, cfg.iters);
        trace = r.trace;
        gwt::save_archive(archive_path, r.links, cfg.topology.num_cells,
                          cfg.topology.users_per_cell, set.coeffs);
    } else {
        auto [factors, t] =
            cfg.model == gwt::ModelKind::shared
                ? gwt::shared_solve(set, cfg.ranks, cfg.iters)
                : gwt::groupwise_solve(set, cfg.ranks, cfg.iters);
        trace = t;
        gwt::save_archive(archive_path, cfg.model, factors, set.coeffs);
    }
    std::cout << "model " << gwt::model_name(cfg.model) << ": objective " << trace.initial()
              << " -> " << trace.final() << " after " << trace.iterations_run << " sweeps\n";
    std::cout << "archive written to " << archive_path << "\n";
    return 0;
}

int cmd_evaluate(const CliOverrides& o) {
    gwt::ExperimentConfig cfg = resolve_config(o);
    if (o.storage_only) {
        gwt::StorageModel storage = gwt::run_storage_only(cfg, /*write_files=*/true);
        std::cout << gwt::report_table_text(cfg, nullptr, storage);
        return 0;
    }
    gwt::ExperimentResult result = gwt::run_experiment_files(cfg);
    std::cout << gwt::report_table_text(cfg, &result, result.storage);
    std::cout << "report files in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_sweep(const CliOverrides& o) {
    gwt::ExperimentConfig cfg = resolve_config(o);
    std::vector<gwt::SweepRow> rows = gwt::run_sweep(cfg);
    std::cout << gwt::sweep_csv_text(rows);
    std::cout << "sweep table written to " << cfg.out_dir << "/sweep.csv\n";
    return 0;
}

int cmd_report(const CliOverrides& o) {
    gwt::ExperimentConfig cfg = resolve_config(o);
    if (o.storage_only) {
        gwt::StorageModel storage = gwt::run_storage_only(cfg, /*write_files=*/true);
        std::cout << gwt::report_table_text(cfg, nullptr, storage);
        return 0;
    }
    const std::filesystem::path table = std::filesystem::path(cfg.out_dir) / "table.txt";
    std::ifstream in(table);
    if (!in) {
        std::cerr << "no stored results at " << table
                  << "; run `gwtk evaluate` first or pass --storage-only\n";
        return 1;
    }
    std::cout << in.rdbuf();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIMO channel-tensor compression and SINR benchmark"};
    app.require_subcommand(1);

    CliOverrides generate_o, compress_o, evaluate_o, sweep_o, report_o;
    add_common(app.add_subcommand("generate", "generate and summarize a channel set"), generate_o);
    add_common(app.add_subcommand("compress", "solve the chosen model and persist the archive"),
               compress_o);
    add_common(app.add_subcommand("evaluate", "run both SINR pipelines and write reports"),
               evaluate_o, /*with_storage_only=*/true);
    add_common(app.add_subcommand("sweep", "sweep a rank axis and emit sweep.csv"), sweep_o);
    add_common(app.add_subcommand("report", "render stored results (or storage-only ratios)"),
               report_o, /*with_storage_only=*/true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("generate")) return cmd_generate(generate_o);
        if (app.got_subcommand("compress")) return cmd_compress(compress_o);
        if (app.got_subcommand("evaluate")) return cmd_evaluate(evaluate_o);
        if (app.got_subcommand("sweep")) return cmd_sweep(sweep_o);
        if (app.got_subcommand("report")) return cmd_report(report_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
