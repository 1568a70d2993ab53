// Command line front end: ingest a speed CSV, run the configured grey models
// through the rolling one-step forecaster and emit the report files.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "greycast/report.hpp"

namespace {

greycast::RunManifest build_manifest(const std::string& manifest_path) {
    if (manifest_path.empty()) return {};
    std::ifstream in(manifest_path);
    if (!in)
        throw std::runtime_error("cannot open manifest file: " + manifest_path);
    nlohmann::json j;
    in >> j;
    return greycast::manifest_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grey system forecasting with least-squares and Bayesian estimation"};

    std::string manifest_path;
    std::string input, speed_col, timestamp_col, models_arg, estimators_arg;
    std::string omega_grid_arg, omega_prior_arg, out_dir;
    std::uint64_t seed = 0;
    std::size_t window = 0, samples = 0, burn_in = 0;
    double omega = 0.0;
    bool global_time_index = false, carry_forward = false;

    app.add_option("--manifest", manifest_path, "JSON manifest; flags below override it");
    auto* opt_input = app.add_option("--input", input, "input CSV path");
    auto* opt_speed = app.add_option("--speed-col", speed_col, "speed column name");
    auto* opt_ts = app.add_option("--timestamp-col", timestamp_col,
                                  "optional timestamp column (echoed, not used)");
    auto* opt_models = app.add_option(
        "--models", models_arg, "comma list of gm11,gvm,gm_sin,gm_cos,gm_sincos");
    auto* opt_est = app.add_option("--estimators", estimators_arg, "comma list of lse,bayes");
    auto* opt_window = app.add_option("--window", window, "rolling window size (default 4)");
    auto* opt_samples = app.add_option("--samples", samples, "MCMC samples (default 5000)");
    auto* opt_burn = app.add_option("--burn-in", burn_in, "MCMC burn-in (default 500)");
    auto* opt_seed = app.add_option("--seed", seed, "run seed");
    auto* opt_omega = app.add_option("--omega", omega, "fixed omega for LSE trig models");
    auto* opt_grid = app.add_option("--omega-grid", omega_grid_arg,
                                    "omega grid lo:hi:step (default 0.01:12:0.01)");
    auto* opt_out = app.add_option("--out-dir", out_dir, "output directory");
    auto* opt_global = app.add_flag("--global-time-index", global_time_index,
                                    "trig time index on the global clock");
    auto* opt_carry = app.add_flag("--carry-forward-priors", carry_forward,
                                   "seed each window's priors with the previous posterior");
    auto* opt_prior = app.add_option("--omega-prior", omega_prior_arg,
                                     "omega prior: chisq (default) or uniform");

    CLI11_PARSE(app, argc, argv);

    try {
        greycast::RunManifest manifest = build_manifest(manifest_path);
        if (*opt_input) manifest.input = input;
        if (*opt_speed) manifest.speed_column = speed_col;
        if (*opt_ts) manifest.timestamp_column = timestamp_col;
        if (*opt_models) {
            manifest.models.clear();
            for (std::size_t pos = 0; pos < models_arg.size();) {
                auto comma = models_arg.find(',', pos);
                if (comma == std::string::npos) comma = models_arg.size();
                manifest.models.push_back(
                    greycast::parse_model(models_arg.substr(pos, comma - pos)));
                pos = comma + 1;
            }
        }
        if (*opt_est) {
            manifest.estimators.clear();
            for (std::size_t pos = 0; pos < estimators_arg.size();) {
                auto comma = estimators_arg.find(',', pos);
                if (comma == std::string::npos) comma = estimators_arg.size();
                manifest.estimators.push_back(
                    greycast::parse_estimator(estimators_arg.substr(pos, comma - pos)));
                pos = comma + 1;
            }
        }
        if (*opt_window) manifest.window = window;
        if (*opt_samples) manifest.samples = samples;
        if (*opt_burn) manifest.burn_in = burn_in;
        if (*opt_seed) manifest.seed = seed;
        if (*opt_omega) manifest.fixed_omega = omega;
        if (*opt_grid) manifest.omega_grid = greycast::parse_grid_spec(omega_grid_arg);
        if (*opt_out) manifest.out_dir = out_dir;
        if (*opt_global) manifest.global_time_index = true;
        if (*opt_carry) manifest.carry_forward_priors = true;
        if (*opt_prior) manifest.omega_prior = greycast::parse_omega_prior(omega_prior_arg);

        const greycast::ReportBundle bundle = greycast::run(manifest);
        greycast::write_reports(bundle);

        std::size_t n_warnings = 0;
        for (const auto& run : bundle.runs) n_warnings += run.result.warnings.size();
        std::cout << "ran " << bundle.runs.size() << " configuration(s) over "
                  << bundle.series.size() << " observations in " << bundle.wall_seconds
                  << " s";
        if (n_warnings) std::cout << " (" << n_warnings << " warning(s), see metrics.json)";
        std::cout << "\nreports written to " << bundle.manifest.out_dir.string() << std::endl;
        for (const auto& e : bundle.metrics.entries) {
            std::cout << "  " << greycast::model_name(e.kind) << "/"
                      << greycast::estimator_name(e.estimator) << " mse=" << e.mse;
            if (e.improvement_pct) std::cout << " improvement=" << *e.improvement_pct << "%";
            std::cout << "\n";
        }
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << std::endl;
        return 1;
    }
}
