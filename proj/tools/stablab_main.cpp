// stablab: batch front end for stabilizing-functional experiments.
//
// Subcommands:
//   experiment   Monte Carlo T_lambda statistics over a lambda grid
//   tails        empirical stabilization-radius tails and decay class
//   verify-stab  perturbation check of a stabilization radius
//   bounds       dependency-graph bound arithmetic
//
// Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stablab/config.hpp"
#include "stablab/report.hpp"
#include "stablab/stabilization.hpp"
#include "stablab/version.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw stablab::ConfigError(0, 0, "cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw stablab::Error("cannot write '" + path.string() + "'");
    out << body;
}

int resolve_threads(std::optional<int> flag_threads, long long config_threads) {
    if (flag_threads) return *flag_threads;
    if (const char* env = std::getenv("STABLAB_THREADS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw stablab::ConfigError(0, 0, "STABLAB_THREADS is not an integer");
        }
    }
    return static_cast<int>(config_threads);
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("config", flags.config_path, "config file path")->required();
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "override the config seed");
    cmd->add_option("--threads", flags.threads, "cap worker threads (0 = auto)");
}

int run_experiment_cmd(const CommonFlags& flags) {
    auto spec = stablab::parse_experiment_config(read_file(flags.config_path));
    if (flags.seed) spec.seed = *flags.seed;
    auto config = spec.build();
    config.threads = resolve_threads(flags.threads, spec.threads);
    const auto result = stablab::run_experiment(config);

    fs::create_directories(flags.out_dir);
    {
        std::ostringstream os;
        stablab::write_raw_csv(os, result);
        write_file(fs::path(flags.out_dir) / "raw.csv", os.str());
    }
    {
        std::ostringstream os;
        stablab::write_var_scaling_csv(os, result);
        write_file(fs::path(flags.out_dir) / "var_scaling.csv", os.str());
    }
    {
        std::ostringstream os;
        stablab::write_ks_csv(os, result);
        write_file(fs::path(flags.out_dir) / "ks_vs_lambda.csv", os.str());
    }
    nlohmann::json summary = stablab::experiment_summary_json(spec, result);
    summary["manifest"] = stablab::report_detail::manifest("experiment", flags.config_path,
                                                           flags.out_dir, result.wall_ms);
    write_file(fs::path(flags.out_dir) / "summary.json", summary.dump(2) + "\n");
    std::cout << "experiment: " << result.per_lambda.size() << " lambda values, seed "
              << result.master_seed << ", outputs in " << flags.out_dir << "\n";
    return 0;
}

int run_tails_cmd(const CommonFlags& flags) {
    auto spec = stablab::parse_tails_config(read_file(flags.config_path));
    if (flags.seed) spec.seed = *flags.seed;
    const auto density = spec.density.build();
    const auto descriptor = spec.descriptor.build();
    try {
        stablab::validate_radius_rule(descriptor, spec.build_rule());
    } catch (const stablab::Error& e) {
        throw stablab::ConfigError(0, 0, e.what());
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto tail = stablab::empirical_tau(descriptor, spec.build_rule(), spec.lambdas,
                                             spec.build_probe(), static_cast<int>(spec.replicates),
                                             spec.t, spec.seed, density);
    const auto fit = stablab::classify_decay(tail);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(flags.out_dir);
    {
        std::ostringstream os;
        stablab::write_tail_csv(os, tail);
        write_file(fs::path(flags.out_dir) / "tail.csv", os.str());
    }
    nlohmann::json summary = stablab::tails_summary_json(spec, tail, fit);
    summary["manifest"] =
        stablab::report_detail::manifest("tails", flags.config_path, flags.out_dir, wall_ms);
    write_file(fs::path(flags.out_dir) / "summary.json", summary.dump(2) + "\n");
    std::cout << "tails: " << tail.t.size() << " grid points, outputs in " << flags.out_dir
              << "\n";
    return 0;
}

int run_verify_stab_cmd(const CommonFlags& flags) {
    auto spec = stablab::parse_verify_stab_config(read_file(flags.config_path));
    if (flags.seed) spec.seed = *flags.seed;
    const auto density = spec.density.build();
    const auto descriptor = spec.descriptor.build();
    const auto rule = spec.build_rule();
    try {
        stablab::validate_radius_rule(descriptor, rule);
    } catch (const stablab::Error& e) {
        throw stablab::ConfigError(0, 0, e.what());
    }
    const int d = density.dim();

    std::vector<double> probe = spec.probe_point;
    if (probe.empty()) {
        probe.resize(d);
        for (int a = 0; a < d; ++a)
            probe[a] = 0.5 * (density.domain().lo()[a] + density.domain().hi()[a]);
    } else if (probe.size() != static_cast<std::size_t>(d)) {
        throw stablab::ConfigError(0, 0, "probe_point must have dim entries");
    }

    const auto t0 = std::chrono::steady_clock::now();
    stablab::Rng setup = stablab::Rng::stream(spec.seed, 0x5E7ULL);
    const auto pp = stablab::sample_poisson(spec.lambda, density, setup.next_u64());
    std::vector<double> coords(pp.coords());
    std::vector<double> marks(pp.marks());
    coords.insert(coords.end(), probe.begin(), probe.end());
    marks.push_back(setup.uniform01());
    stablab::MarkedConfiguration config(d, std::move(coords), std::move(marks));
    const std::size_t probe_idx = config.size() - 1;

    auto radius = stablab::radius_at(config, spec.lambda, probe_idx, rule);
    double used_radius = radius.value;
    if (spec.negative_control) used_radius *= 0.5;
    const int violations =
        stablab::verify_stabilization(descriptor, spec.lambda, config, probe_idx, used_radius,
                                      static_cast<int>(spec.trials), spec.seed, density);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(flags.out_dir);
    {
        std::ostringstream os;
        stablab::write_config_csv(os, config);
        write_file(fs::path(flags.out_dir) / "config.csv", os.str());
    }
    nlohmann::json summary = {
        {"version", stablab::kVersion},
        {"config", stablab::render_verify_stab_config(spec)},
        {"lambda", spec.lambda},
        {"trials", spec.trials},
        {"radius", radius.value},
        {"radius_isolated", radius.isolated},
        {"used_radius", used_radius},
        {"negative_control", spec.negative_control},
        {"violations", violations},
    };
    summary["manifest"] =
        stablab::report_detail::manifest("verify-stab", flags.config_path, flags.out_dir, wall_ms);
    write_file(fs::path(flags.out_dir) / "summary.json", summary.dump(2) + "\n");
    std::cout << "verify-stab: " << violations << " violations in " << spec.trials << " trials\n";
    return 0;
}

int run_bounds_cmd(const CommonFlags& flags) {
    const auto spec = stablab::parse_bounds_config(read_file(flags.config_path));
    fs::create_directories(flags.out_dir);
    nlohmann::json summary = stablab::bounds_summary_json(spec);
    summary["manifest"] =
        stablab::report_detail::manifest("bounds", flags.config_path, flags.out_dir, 0.0);
    write_file(fs::path(flags.out_dir) / "summary.json", summary.dump(2) + "\n");
    std::cout << "bounds: outputs in " << flags.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stabilizing geometric functionals: experiments and bounds"};
    app.set_version_flag("--version", stablab::kVersion);
    app.require_subcommand(1);

    CommonFlags experiment_flags, tails_flags, stab_flags, bounds_flags;
    auto* experiment = app.add_subcommand("experiment", "Monte Carlo T_lambda statistics");
    add_common(experiment, experiment_flags);
    auto* tails = app.add_subcommand("tails", "stabilization radius tails");
    add_common(tails, tails_flags);
    auto* verify_stab = app.add_subcommand("verify-stab", "stabilization radius verification");
    add_common(verify_stab, stab_flags);
    auto* bounds = app.add_subcommand("bounds", "bound arithmetic");
    add_common(bounds, bounds_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        if (experiment->parsed()) return run_experiment_cmd(experiment_flags);
        if (tails->parsed()) return run_tails_cmd(tails_flags);
        if (verify_stab->parsed()) return run_verify_stab_cmd(stab_flags);
        if (bounds->parsed()) return run_bounds_cmd(bounds_flags);
    } catch (const stablab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
