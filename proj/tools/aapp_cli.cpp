// Command-line front end: `run` executes a benchmark grid, `aggregate` and
// `wins` summarize a records file, `demo` walks one 2-D initialization
// step by step. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aapp.hpp"

namespace {

struct RunArgs {
    std::string data_path;
    std::string shape = "ring";
    std::size_t n = 1000;
    std::size_t d = 2;
    double noise = 0.05;
    std::uint64_t data_seed = 42;
    std::string preprocess = "none";
    bool signed_max = false;
    std::vector<std::string> methods = {"uniform", "furthest-first", "furthest-sum",
                                        "aapp",    "kmeanspp",       "aapp-mc"};
    std::vector<std::size_t> k_list;
    std::size_t iters = 10;
    std::size_t seeds = 50;
    std::vector<double> chain_fracs = {0.01, 0.05, 0.1, 0.2};
    std::uint64_t base_seed = 1;
    std::string out_dir = ".";
    bool serial = false;
    bool omit_times = false;
};

struct DemoArgs {
    std::string shape = "ring";
    std::size_t n = 200;
    std::size_t d = 2;
    double noise = 0.05;
    std::size_t k = 4;
    std::uint64_t seed = 1;
    std::vector<std::string> methods = {"uniform", "furthest-sum", "aapp"};
};

aapp::Matrix load_run_data(const RunArgs& args, std::string& dataset_id) {
    aapp::Matrix x(1, 1);
    if (!args.data_path.empty()) {
        dataset_id = std::filesystem::path(args.data_path).stem().string();
        x = aapp::load_csv(args.data_path);
    } else {
        dataset_id = args.shape + "-n" + std::to_string(args.n) + "-d" +
                     std::to_string(args.d);
        aapp::RngStream rng(args.data_seed);
        x = aapp::gen_synthetic(aapp::parse_shape(args.shape), args.n, args.d, rng,
                                args.noise);
    }
    aapp::PreprocessSpec spec;
    spec.scheme = aapp::parse_preprocess(args.preprocess);
    spec.signed_max_scale = args.signed_max;
    return aapp::preprocess(x, spec);
}

int cmd_run(const RunArgs& args) {
    std::string dataset_id;
    const aapp::Matrix x = load_run_data(args, dataset_id);

    aapp::ExperimentConfig cfg;
    cfg.dataset_id = dataset_id;
    cfg.methods = args.methods;
    cfg.k_list = args.k_list;
    cfg.iters = args.iters;
    cfg.seeds = args.seeds;
    cfg.chain_fractions = args.chain_fracs;
    cfg.base_seed = args.base_seed;
    cfg.omit_times = args.omit_times;

    // Execution is serial either way; --serial marks timing-grade runs.
    const std::vector<aapp::ResultRecord> records = aapp::run_grid(cfg, x);

    std::filesystem::create_directories(args.out_dir);
    const std::string path =
        (std::filesystem::path(args.out_dir) / "records.csv").string();
    aapp::write_records(path, records);
    std::cout << "wrote " << records.size() << " records to " << path << '\n';
    return 0;
}

int cmd_aggregate(const std::string& records_path, const std::string& out_dir) {
    const std::vector<aapp::ResultRecord> records = aapp::read_records(records_path);
    const std::vector<aapp::QuantileRow> rows = aapp::aggregate_quantiles(records);
    std::filesystem::create_directories(out_dir);
    const std::string path = (std::filesystem::path(out_dir) / "aggregate.csv").string();
    std::ofstream os(path);
    if (!os) throw aapp::input_error("cannot write '" + path + "'");
    aapp::write_quantiles(os, rows);
    std::cout << "wrote " << rows.size() << " groups to " << path << '\n';
    return 0;
}

int cmd_wins(const std::string& records_path, const std::string& out_dir) {
    const std::vector<aapp::ResultRecord> records = aapp::read_records(records_path);
    std::filesystem::create_directories(out_dir);
    const std::string path = (std::filesystem::path(out_dir) / "wins.csv").string();
    std::ofstream os(path);
    if (!os) throw aapp::input_error("cannot write '" + path + "'");
    aapp::write_win_tables(os, records);
    std::cout << "wrote win tables to " << path << '\n';
    return 0;
}

// Replays one initialization selection by selection, printing the running
// mean squared distance to the growing archetype hull.
int cmd_demo(const DemoArgs& args) {
    aapp::RngStream data_rng(args.seed);
    const aapp::Matrix x = aapp::gen_synthetic(aapp::parse_shape(args.shape), args.n,
                                               args.d, data_rng, args.noise);
    std::cout << "method,step,chosen_index,mse\n";
    for (const std::string& name : args.methods) {
        std::string id = name;
        if (id == "aapp-mc") id = "aapp-mc-0.1";
        aapp::RngStream rng(aapp::cell_seed(args.seed, id, args.k, 0));
        const aapp::ArchetypeSet z = aapp::run_init(id, x, args.k, rng);
        for (std::size_t j = 1; j <= z.indices.size(); ++j) {
            const aapp::Matrix prefix = aapp::gather_rows(
                x, {z.indices.begin(), z.indices.begin() + static_cast<long>(j)});
            const std::vector<double> d2 = aapp::batch_dist(x, prefix);
            double total = 0.0;
            for (double v : d2) total += v;
            std::cout << name << ',' << j << ',' << z.indices[j - 1] << ','
                      << aapp::detail::fmt_double(total / static_cast<double>(x.rows()))
                      << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Archetypal-analysis initialization and benchmark toolkit"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Execute a (method x k x seed) grid");
    auto* data_opt = run->add_option("--data", run_args.data_path, "CSV input file");
    run->add_option("--synthetic", run_args.shape,
                    "Synthetic shape: ring, polygon-hull, gaussian-blob")
        ->excludes(data_opt);
    run->add_option("--n", run_args.n, "Synthetic sample count");
    run->add_option("--d", run_args.d, "Synthetic dimension");
    run->add_option("--noise", run_args.noise, "Synthetic noise level");
    run->add_option("--data-seed", run_args.data_seed, "Synthetic generator seed");
    run->add_option("--preprocess", run_args.preprocess, "none, cms, or std");
    run->add_flag("--signed-max", run_args.signed_max,
                  "cms: scale by signed maximum instead of max magnitude");
    run->add_option("--methods", run_args.methods, "Initialization methods")
        ->delimiter(',');
    run->add_option("--k", run_args.k_list, "Archetype counts")
        ->delimiter(',')
        ->required();
    run->add_option("--iters", run_args.iters, "Optimizer cycles per run");
    run->add_option("--seeds", run_args.seeds, "Seeds per (method, k) cell");
    run->add_option("--chain-fracs", run_args.chain_fracs,
                    "Chain lengths for aapp-mc, as fractions of n")
        ->delimiter(',');
    run->add_option("--base-seed", run_args.base_seed, "Grid base seed");
    run->add_option("--out", run_args.out_dir, "Output directory");
    run->add_flag("--serial", run_args.serial, "Timing-grade serial execution");
    run->add_flag("--omit-times", run_args.omit_times,
                  "Zero the time columns for byte-reproducible output");

    std::string records_path;
    std::string agg_out = ".";
    CLI::App* aggregate =
        app.add_subcommand("aggregate", "Quantile summary of a records file");
    aggregate->add_option("--records", records_path, "records.csv path")->required();
    aggregate->add_option("--out", agg_out, "Output directory");

    std::string wins_records;
    std::string wins_out = ".";
    CLI::App* wins = app.add_subcommand("wins", "Win-count tables of a records file");
    wins->add_option("--records", wins_records, "records.csv path")->required();
    wins->add_option("--out", wins_out, "Output directory");

    DemoArgs demo_args;
    CLI::App* demo =
        app.add_subcommand("demo", "Step-by-step 2-D initialization walkthrough");
    demo->add_option("--shape", demo_args.shape, "ring, polygon-hull, gaussian-blob");
    demo->add_option("--n", demo_args.n, "Sample count");
    demo->add_option("--d", demo_args.d, "Dimension");
    demo->add_option("--noise", demo_args.noise, "Noise level");
    demo->add_option("--k", demo_args.k, "Archetype count");
    demo->add_option("--seed", demo_args.seed, "Seed");
    demo->add_option("--methods", demo_args.methods, "Methods to walk through")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (aggregate->parsed()) return cmd_aggregate(records_path, agg_out);
        if (wins->parsed()) return cmd_wins(wins_records, wins_out);
        if (demo->parsed()) return cmd_demo(demo_args);
        std::cerr << app.help();
        return 1;
    } catch (const aapp::config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const aapp::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
