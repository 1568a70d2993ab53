#pragma once

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "greycast/csv.hpp"
#include "greycast/rolling.hpp"
#include "greycast/rng.hpp"
#include "greycast/series.hpp"
#include "greycast/version.hpp"

namespace greycast {

/// Everything a run needs; CLI flags map onto these fields one-to-one.
struct RunManifest {
    std::filesystem::path input;
    std::string speed_column = "speed";
    std::optional<std::string> timestamp_column;
    std::vector<ModelKind> models = {ModelKind::GM11, ModelKind::GVM, ModelKind::GM_SIN,
                                     ModelKind::GM_COS, ModelKind::GM_SINCOS};
    std::vector<Estimator> estimators = {Estimator::LSE, Estimator::BAYES};
    std::size_t window = 4;
    std::size_t samples = 5000;
    std::size_t burn_in = 500;
    std::uint64_t seed = 1;
    std::optional<double> fixed_omega;  // skips the grid search when set
    GridSpec omega_grid;                // default 0.01:12:0.01
    std::filesystem::path out_dir = "grey_run";
    bool global_time_index = false;
    bool carry_forward_priors = false;
    OmegaPrior omega_prior = OmegaPrior::ChiSquared;

    void validate() const {
        if (input.empty())
            throw std::invalid_argument("manifest: input path is required");
        if (models.empty() || estimators.empty())
            throw std::invalid_argument("manifest: need at least one model and one estimator");
        for (std::size_t i = 0; i < models.size(); ++i)
            for (std::size_t j = i + 1; j < models.size(); ++j)
                if (models[i] == models[j])
                    throw std::invalid_argument("manifest: model listed twice: " +
                                                model_name(models[i]));
        for (std::size_t i = 0; i < estimators.size(); ++i)
            for (std::size_t j = i + 1; j < estimators.size(); ++j)
                if (estimators[i] == estimators[j])
                    throw std::invalid_argument("manifest: estimator listed twice");
        if (window < 2)
            throw std::invalid_argument("manifest: window must be >= 2");
        if (samples <= burn_in)
            throw std::invalid_argument("manifest: samples must exceed burn_in");
    }
};

struct ConfigRun {
    RollingRunResult result;
    std::optional<double> selected_omega;  // LSE trig: fixed or grid-selected
};

struct ReportBundle {
    RunManifest manifest;
    ObservationSeries series;
    std::vector<ConfigRun> runs;       // models x estimators, manifest order
    MetricReport metrics;              // one entry per run, improvements on pairs
    double wall_seconds = 0.0;
};

inline std::string omega_prior_name(OmegaPrior p) {
    return p == OmegaPrior::ChiSquared ? "chisq" : "uniform";
}

inline OmegaPrior parse_omega_prior(const std::string& name) {
    if (name == "chisq") return OmegaPrior::ChiSquared;
    if (name == "uniform") return OmegaPrior::Uniform;
    throw std::invalid_argument("unknown omega prior: " + name);
}

inline GridSpec parse_grid_spec(const std::string& text) {
    GridSpec grid;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("omega grid must be lo:hi:step, got '" + text + "'");
    try {
        grid.lo = std::stod(text.substr(0, c1));
        grid.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        grid.step = std::stod(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("omega grid must be lo:hi:step, got '" + text + "'");
    }
    if (!(grid.step > 0.0) || grid.hi < grid.lo)
        throw std::invalid_argument("omega grid is empty: '" + text + "'");
    return grid;
}

inline std::string grid_spec_text(const GridSpec& grid) {
    return std::to_string(grid.lo) + ":" + std::to_string(grid.hi) + ":" +
           std::to_string(grid.step);
}

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["input"] = m.input.string();
    j["speed_col"] = m.speed_column;
    if (m.timestamp_column) j["timestamp_col"] = *m.timestamp_column;
    std::vector<std::string> models, estimators;
    for (auto k : m.models) models.push_back(model_name(k));
    for (auto e : m.estimators) estimators.push_back(estimator_name(e));
    j["models"] = models;
    j["estimators"] = estimators;
    j["window"] = m.window;
    j["samples"] = m.samples;
    j["burn_in"] = m.burn_in;
    j["seed"] = m.seed;
    if (m.fixed_omega) j["omega"] = *m.fixed_omega;
    j["omega_grid"] = grid_spec_text(m.omega_grid);
    j["out_dir"] = m.out_dir.string();
    j["global_time_index"] = m.global_time_index;
    j["carry_forward_priors"] = m.carry_forward_priors;
    j["omega_prior"] = omega_prior_name(m.omega_prior);
    return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    if (j.contains("input")) m.input = j.at("input").get<std::string>();
    if (j.contains("speed_col")) m.speed_column = j.at("speed_col").get<std::string>();
    if (j.contains("timestamp_col"))
        m.timestamp_column = j.at("timestamp_col").get<std::string>();
    if (j.contains("models")) {
        m.models.clear();
        for (const auto& name : j.at("models")) m.models.push_back(parse_model(name));
    }
    if (j.contains("estimators")) {
        m.estimators.clear();
        for (const auto& name : j.at("estimators"))
            m.estimators.push_back(parse_estimator(name));
    }
    if (j.contains("window")) m.window = j.at("window").get<std::size_t>();
    if (j.contains("samples")) m.samples = j.at("samples").get<std::size_t>();
    if (j.contains("burn_in")) m.burn_in = j.at("burn_in").get<std::size_t>();
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("omega")) m.fixed_omega = j.at("omega").get<double>();
    if (j.contains("omega_grid"))
        m.omega_grid = parse_grid_spec(j.at("omega_grid").get<std::string>());
    if (j.contains("out_dir")) m.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("global_time_index"))
        m.global_time_index = j.at("global_time_index").get<bool>();
    if (j.contains("carry_forward_priors"))
        m.carry_forward_priors = j.at("carry_forward_priors").get<bool>();
    if (j.contains("omega_prior"))
        m.omega_prior = parse_omega_prior(j.at("omega_prior").get<std::string>());
    return m;
}

namespace detail {

/// Shortest round-trip decimal form, so emitted CSVs are lossless and stable.
inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string trace_field(const GreyParameters& p, const std::string& name) {
    const auto names = parameter_names(p.kind);
    if (name == "a") return format_double(p.a);
    for (std::size_t i = 1; i < names.size(); ++i)
        if (names[i] == name) return format_double(p.b[i - 1]);
    if (name == "omega" && p.omega) return format_double(*p.omega);
    if (name == "tau" && p.tau) return format_double(*p.tau);
    return "";
}

}  // namespace detail

/**
 * Runs every (model, estimator) configuration of the manifest over one
 * series. Configurations execute concurrently; the per-configuration seeds
 * derive deterministically from the run seed, so scheduling never changes
 * the results.
 */
inline ReportBundle run(const RunManifest& manifest) {
    manifest.validate();
    const auto started = std::chrono::steady_clock::now();

    ReportBundle bundle;
    bundle.manifest = manifest;
    ColumnMapping mapping{manifest.speed_column, manifest.timestamp_column};
    bundle.series = ingest_csv(manifest.input, mapping);

    struct PlannedConfig {
        RollingConfig rolling;
        std::optional<double> selected_omega;
    };
    std::vector<PlannedConfig> plan;
    std::size_t config_index = 0;
    for (ModelKind kind : manifest.models) {
        // One omega per model under LSE, chosen up front (grid search unless fixed).
        std::optional<double> lse_omega;
        if (is_trigonometric(kind) &&
            std::find(manifest.estimators.begin(), manifest.estimators.end(),
                      Estimator::LSE) != manifest.estimators.end()) {
            lse_omega = manifest.fixed_omega
                            ? *manifest.fixed_omega
                            : grid_search_omega(bundle.series, kind, manifest.omega_grid,
                                                manifest.window, manifest.global_time_index)
                                  .omega;
        }
        for (Estimator estimator : manifest.estimators) {
            PlannedConfig pc;
            pc.rolling.window = manifest.window;
            pc.rolling.kind = kind;
            pc.rolling.estimator = estimator;
            pc.rolling.global_time_index = manifest.global_time_index;
            pc.rolling.carry_forward_priors = manifest.carry_forward_priors;
            if (estimator == Estimator::LSE) {
                pc.rolling.fixed_omega = lse_omega;
                pc.selected_omega = lse_omega;
            } else {
                pc.rolling.bayes.samples = manifest.samples;
                pc.rolling.bayes.burn_in = manifest.burn_in;
                pc.rolling.bayes.omega_prior = manifest.omega_prior;
                pc.rolling.bayes.seed = derive_seed(manifest.seed, config_index);
            }
            pc.rolling.validate();  // abort before any computation on bad config
            plan.push_back(std::move(pc));
            ++config_index;
        }
    }

    std::vector<std::future<RollingRunResult>> futures;
    futures.reserve(plan.size());
    for (const auto& pc : plan)
        futures.push_back(std::async(std::launch::async, [&series = bundle.series,
                                                          rolling = pc.rolling] {
            return run_rolling(series, rolling);
        }));
    for (std::size_t i = 0; i < plan.size(); ++i)
        bundle.runs.push_back({futures[i].get(), plan[i].selected_omega});

    // Metrics: paired improvements where a model ran under both estimators.
    std::vector<ModelRunPair> pairs;
    std::map<std::size_t, bool> in_pair;
    for (std::size_t i = 0; i < bundle.runs.size(); ++i)
        for (std::size_t j = 0; j < bundle.runs.size(); ++j) {
            const auto& a = bundle.runs[i].result;
            const auto& b = bundle.runs[j].result;
            if (a.kind == b.kind && a.estimator == Estimator::LSE &&
                b.estimator == Estimator::BAYES) {
                pairs.push_back({a, b});
                in_pair[i] = in_pair[j] = true;
            }
        }
    bundle.metrics = compute_metrics(pairs);
    for (std::size_t i = 0; i < bundle.runs.size(); ++i)
        if (!in_pair[i]) {
            const auto& r = bundle.runs[i].result;
            bundle.metrics.entries.push_back({r.kind, r.estimator, r.mse, std::nullopt});
        }

    bundle.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return bundle;
}

/// Warnings attached to the run matching a metric entry.
inline const std::vector<std::string>& warnings_for(const ReportBundle& bundle,
                                                    const MetricEntry& entry) {
    for (const auto& run : bundle.runs)
        if (run.result.kind == entry.kind && run.result.estimator == entry.estimator)
            return run.result.warnings;
    static const std::vector<std::string> empty;
    return empty;
}

/// Writes predictions.csv, params_trace.csv, omega_trace.csv,
/// posterior_summary.csv, metrics.json and manifest_echo.json under out_dir.
/// All writes happen after computation completed, never partially.
inline void write_reports(const ReportBundle& bundle) {
    namespace fs = std::filesystem;
    using detail::format_double;
    const fs::path dir = bundle.manifest.out_dir;
    fs::create_directories(dir);

    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error(std::string("cannot write output file: ") + name);
        return out;
    };

    {
        auto out = open("predictions.csv");
        out << "model,estimator,k,timestamp,observed,predicted\n";
        for (const auto& run : bundle.runs)
            for (const auto& p : run.result.predictions) {
                out << model_name(run.result.kind) << ','
                    << estimator_name(run.result.estimator) << ',' << p.k << ',';
                if (!bundle.series.timestamps.empty())
                    out << format_double(bundle.series.timestamps[p.k - 1]);
                out << ',' << format_double(p.observed) << ',' << format_double(p.predicted)
                    << '\n';
            }
    }

    {
        auto out = open("params_trace.csv");
        out << "model,estimator,k,a,b,b1,b2,b3,omega,tau\n";
        for (const auto& run : bundle.runs)
            for (std::size_t i = 0; i < run.result.parameter_trace.size(); ++i) {
                const auto& p = run.result.parameter_trace[i];
                const std::size_t k = run.result.predictions[i].k - 1;  // window end
                out << model_name(run.result.kind) << ','
                    << estimator_name(run.result.estimator) << ',' << k;
                for (const char* field : {"a", "b", "b1", "b2", "b3", "omega", "tau"})
                    out << ',' << detail::trace_field(p, field);
                out << '\n';
            }
    }

    {
        auto out = open("omega_trace.csv");
        out << "model,estimator,k,omega\n";
        for (const auto& run : bundle.runs) {
            if (!is_trigonometric(run.result.kind)) continue;
            for (std::size_t i = 0; i < run.result.parameter_trace.size(); ++i) {
                const auto& p = run.result.parameter_trace[i];
                if (!p.omega) continue;
                out << model_name(run.result.kind) << ','
                    << estimator_name(run.result.estimator) << ','
                    << run.result.predictions[i].k - 1 << ',' << format_double(*p.omega)
                    << '\n';
            }
        }
    }

    {
        auto out = open("posterior_summary.csv");
        out << "model,k,node,mean,sd,q2.5,q25,q50,q75,q97.5,samples\n";
        for (const auto& run : bundle.runs) {
            if (run.result.estimator != Estimator::BAYES) continue;
            for (std::size_t i = 0; i < run.result.posterior_trace.size(); ++i) {
                const std::size_t k = run.result.predictions[i].k - 1;
                for (const auto& node : run.result.posterior_trace[i].nodes)
                    out << model_name(run.result.kind) << ',' << k << ',' << node.name << ','
                        << format_double(node.mean) << ',' << format_double(node.sd) << ','
                        << format_double(node.q2_5) << ',' << format_double(node.q25) << ','
                        << format_double(node.q50) << ',' << format_double(node.q75) << ','
                        << format_double(node.q97_5) << ',' << node.count << '\n';
            }
        }
    }

    {
        nlohmann::ordered_json entries = nlohmann::ordered_json::array();
        for (const auto& e : bundle.metrics.entries) {
            nlohmann::ordered_json j;
            j["model"] = model_name(e.kind);
            j["estimator"] = estimator_name(e.estimator);
            j["mse"] = e.mse;
            if (e.improvement_pct) j["improvement_pct"] = *e.improvement_pct;
            j["warnings"] = warnings_for(bundle, e);
            entries.push_back(std::move(j));
        }
        auto out = open("metrics.json");
        out << entries.dump(2) << '\n';
    }

    {
        nlohmann::ordered_json j;
        j["manifest"] = manifest_to_json(bundle.manifest);
        j["version"] = kVersion;
        j["seed"] = bundle.manifest.seed;
        j["wall_time_seconds"] = bundle.wall_seconds;
        nlohmann::ordered_json selected = nlohmann::ordered_json::object();
        for (const auto& run : bundle.runs)
            if (run.selected_omega)
                selected[model_name(run.result.kind)] = *run.selected_omega;
        j["selected_omegas"] = selected;
        auto out = open("manifest_echo.json");
        out << j.dump(2) << '\n';
    }
}

}  // namespace greycast
