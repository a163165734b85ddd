#include "raincast/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "raincast/correlogram.hpp"
#include "raincast/diagnostics.hpp"
#include "raincast/series.hpp"

namespace raincast {

namespace {

namespace fs = std::filesystem;

// Re-tag any escaping exception with the pipeline stage it belongs to,
// so exit codes follow the documented map.
template <class F>
auto stage_guard(Stage stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

// Temp-then-rename so a crashed run never leaves a half-written report.
void write_atomic(const fs::path& dir, const std::string& filename,
                  const std::string& content) {
    try {
        fs::create_directories(dir);
        const fs::path target = dir / filename;
        const fs::path tmp = dir / (filename + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot open " + tmp.string() +
                                         " for writing");
            out << content;
            out.flush();
            if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
        }
        fs::rename(tmp, target);
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(Stage::Io, e.what());
    }
}

std::pair<int, unsigned> shift_anchor(int year, unsigned month, int by) {
    std::chrono::year_month ym{std::chrono::year{year}, std::chrono::month{month}};
    ym += std::chrono::months{by};
    return {static_cast<int>(ym.year()), static_cast<unsigned>(ym.month())};
}

// Rebuild the calendar-anchored view of a series whose origin_offset
// may have moved (differencing, prefiltering).
MonthlySeries to_monthly(const Series& s, int base_year, unsigned base_month) {
    const auto [y, m] = shift_anchor(base_year, base_month, s.origin_offset);
    MonthlySeries out;
    out.start_year = y;
    out.start_month = m;
    out.values = s.values;
    out.mask = s.mask;
    out.label = s.label;
    return out;
}

MonthlySeries load_input(const PipelineConfig& config) {
    if (config.input.empty())
        throw PipelineError(Stage::Parse, "no input file configured");
    std::ifstream in(config.input, std::ios::binary);
    if (!in)
        throw PipelineError(Stage::Parse, "cannot open input file " + config.input);

    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    in.clear();
    in.seekg(0);

    return stage_guard(Stage::Parse, [&]() -> MonthlySeries {
        if (header == "date,value")
            return aggregate_monthly(parse_daily_csv(in), config.divisor);
        if (header == "year,month,value,observed") return read_monthly_csv(in);
        if (header == "index,value,observed") {
            // Anchorless series file: pin it to a nominal calendar.
            const Series s = read_series_csv(in);
            MonthlySeries m;
            m.start_year = 1969;
            m.start_month = 1;
            m.values = s.values;
            m.mask = s.mask;
            m.label = s.label;
            return m;
        }
        throw std::runtime_error("unrecognized input header \"" + header + "\" in " +
                                 config.input +
                                 " (expected a daily, monthly, or series CSV)");
    });
}

FilterSpec resolve_filter_spec(const Series& s, const PipelineConfig& config) {
    FilterSpec spec;
    spec.window = config.window;
    spec.phi = config.phi ? *config.phi : estimate_phi(s);
    spec.validate();
    return spec;
}

struct Prepared {
    Series series;  // fully observed, analysis-ready
    std::optional<HoleSet> holes;
    std::optional<ImputationResult> imputation;
};

// Puncture (when configured), fill every hole, optionally run the
// whole-series moving average. `always_impute` forces an imputation
// report even when there is nothing to fill.
Prepared prepare(const MonthlySeries& monthly, const PipelineConfig& config,
                 bool always_impute) {
    return stage_guard(Stage::Transform, [&] {
        Prepared prep;
        MonthlySeries working = monthly;
        if (config.holes) {
            auto [punctured, holeset] = puncture(working, *config.holes, config.seed);
            working = std::move(punctured);
            prep.holes = std::move(holeset);
        }
        Series s = working.to_series();
        if (!s.fully_observed() || always_impute) {
            if (config.impute_strategy == "filter")
                prep.imputation = impute(s, resolve_filter_spec(s, config));
            else
                prep.imputation = baseline_impute(
                    s, baseline_strategy_from_name(config.impute_strategy));
            prep.series = prep.imputation->series;
        } else {
            prep.series = std::move(s);
        }
        if (config.prefilter)
            prep.series = filter_series(prep.series,
                                        resolve_filter_spec(prep.series, config),
                                        !config.unnormalized_filter);
        return prep;
    });
}

struct Transformed {
    Series transformed;  // y': log scale when enabled
    Series working;      // z: after seasonal and ordinary differencing
    MeanTest mean_test{};
    bool mean_tested = false;
    bool include_mean = false;
    int b = 0;            // first computable index fed to the mean test
    int n_pre_diff = 0;   // observation count before differencing
};

Transformed apply_transforms(const Series& prepared, const PipelineConfig& config) {
    return stage_guard(Stage::Transform, [&] {
        Transformed t;
        t.transformed =
            config.log ? log_transform(prepared, config.log_offset) : prepared;
        t.working = t.transformed;
        for (int i = 0; i < config.order.D; ++i)
            t.working = seasonal_difference(t.working, config.order.s);
        for (int i = 0; i < config.order.d; ++i)
            t.working = seasonal_difference(t.working, 1);

        t.b = config.order.s * config.order.D + config.order.d + 1;
        t.n_pre_diff = static_cast<int>(t.transformed.size());
        if (t.working.observed_count() >= 2 && t.n_pre_diff - t.b + 1 >= 2) {
            t.mean_test = mean_significance(t.working, t.n_pre_diff, t.b);
            t.mean_tested = true;
            t.include_mean =
                config.force_mean || std::abs(t.mean_test.t_value) >= 2.0;
        } else {
            t.include_mean = config.force_mean;
        }
        return t;
    });
}

struct ModelChain {
    Prepared prep;
    Transformed trans;
    FittedModel model;
};

ModelChain fit_chain(const MonthlySeries& monthly, const PipelineConfig& config) {
    ModelChain chain;
    chain.prep = prepare(monthly, config, false);
    chain.trans = apply_transforms(chain.prep.series, config);
    chain.model = stage_guard(Stage::Fit, [&] {
        return fit(chain.trans.working, config.order, chain.trans.include_mean);
    });
    return chain;
}

// ---- JSON assembly -------------------------------------------------

nlohmann::json model_doc(const FittedModel& model, const Transformed& trans) {
    nlohmann::json doc = nlohmann::json::parse(model_json(model));
    if (trans.mean_tested)
        doc["mean_test"] = {{"mean", trans.mean_test.mean},
                            {"sd", trans.mean_test.sd},
                            {"n", trans.mean_test.n},
                            {"b", trans.mean_test.b},
                            {"t_value", trans.mean_test.t_value},
                            {"mean_included", model.include_mean}};
    return doc;
}

nlohmann::json forecast_doc(const ForecastResult& fc) {
    nlohmann::json doc{{"horizon", fc.horizon}, {"level", fc.level},
                       {"point", fc.point},     {"lower", fc.lower},
                       {"upper", fc.upper},     {"psi", fc.psi}};
    if (!fc.original_scale_point.empty())
        doc["original_scale"] = {{"point", fc.original_scale_point},
                                 {"lower", fc.original_scale_lower},
                                 {"upper", fc.original_scale_upper}};
    return doc;
}

nlohmann::json holes_doc(const HoleSet& holes) {
    return {{"count", holes.indices.size()},
            {"seed", holes.seed},
            {"indices", holes.indices}};
}

nlohmann::json config_doc(const PipelineConfig& c) {
    nlohmann::json doc{{"order",
                        {{"p", c.order.p},
                         {"d", c.order.d},
                         {"q", c.order.q},
                         {"P", c.order.P},
                         {"D", c.order.D},
                         {"Q", c.order.Q},
                         {"s", c.order.s}}},
                       {"log", c.log},
                       {"impute_strategy", c.impute_strategy},
                       {"window", c.window},
                       {"prefilter", c.prefilter},
                       {"seed", c.seed},
                       {"horizon", c.horizon},
                       {"level", c.level},
                       {"force_mean", c.force_mean}};
    doc["log_offset"] = c.log_offset ? nlohmann::json(*c.log_offset) : nullptr;
    doc["phi"] = c.phi ? nlohmann::json(*c.phi) : nullptr;
    doc["holes"] = c.holes ? nlohmann::json(*c.holes) : nullptr;
    return doc;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

template <class F>
std::string capture_csv(F&& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

// ---- identification ------------------------------------------------

struct IdentifyOutput {
    Correlogram gram;
    nlohmann::json summary;
};

IdentifyOutput identify_series(const Series& prepared, const PipelineConfig& config) {
    return stage_guard(Stage::Transform, [&] {
        Series basis =
            config.log ? log_transform(prepared, config.log_offset) : prepared;
        if (config.identify_differenced) {
            for (int i = 0; i < config.order.D; ++i)
                basis = seasonal_difference(basis, config.order.s);
            for (int i = 0; i < config.order.d; ++i)
                basis = seasonal_difference(basis, 1);
        }
        IdentifyOutput out;
        out.gram = build_correlogram(basis);

        std::vector<int> acf_spikes, pacf_spikes;
        for (std::size_t i = 0; i < out.gram.lags.size(); ++i) {
            if (std::abs(out.gram.acf[i]) > out.gram.band)
                acf_spikes.push_back(out.gram.lags[i]);
            if (std::abs(out.gram.pacf[i]) > out.gram.band)
                pacf_spikes.push_back(out.gram.lags[i]);
        }
        out.summary = {{"n", out.gram.n},
                       {"max_lag", static_cast<int>(out.gram.lags.size())},
                       {"band", out.gram.band},
                       {"differenced", config.identify_differenced},
                       {"acf_spikes_beyond_band", acf_spikes},
                       {"pacf_spikes_beyond_band", pacf_spikes}};
        return out;
    });
}

// ---- full single-dataset branch ------------------------------------

struct BranchArtifacts {
    ModelChain chain;
    AdequacyReport adequacy;
    ForecastResult fcast;
    EvaluationReport eval;
};

BranchArtifacts run_branch(const MonthlySeries& monthly, const PipelineConfig& config,
                           const std::string& label) {
    BranchArtifacts art;
    art.chain = fit_chain(monthly, config);
    art.adequacy =
        stage_guard(Stage::Diagnose, [&] { return adequacy_report(art.chain.model); });
    art.fcast = stage_guard(Stage::Diagnose, [&] {
        return forecast(art.chain.model, art.chain.trans.transformed, config.horizon,
                        config.level);
    });
    art.eval = stage_guard(Stage::Diagnose, [&] {
        const AlignedErrors errors =
            in_sample_errors(art.chain.model, art.chain.trans.transformed);
        return evaluate(label, errors.model, errors.naive);
    });
    return art;
}

nlohmann::json branch_doc(const BranchArtifacts& art) {
    nlohmann::json doc;
    doc["model"] = model_doc(art.chain.model, art.chain.trans);
    doc["adequacy"] = nlohmann::json::parse(adequacy_json(art.adequacy));
    doc["forecast"] = forecast_doc(art.fcast);
    doc["evaluation"] = nlohmann::json::parse(evaluation_json(art.eval));
    if (art.chain.prep.imputation)
        doc["imputation"] =
            nlohmann::json::parse(imputation_report_json(*art.chain.prep.imputation));
    return doc;
}

std::string series_label(const MonthlySeries& monthly) {
    return monthly.label.empty() ? "series" : monthly.label;
}

// ---- commands ------------------------------------------------------

void cmd_ingest(const PipelineConfig& config) {
    MonthlySeries monthly = load_input(config);
    std::optional<HoleSet> holes;
    if (config.holes) {
        auto [punctured, holeset] = stage_guard(Stage::Transform, [&] {
            return puncture(monthly, *config.holes, config.seed);
        });
        monthly = std::move(punctured);
        holes = std::move(holeset);
    }
    write_atomic(config.out_dir, "monthly.csv",
                 capture_csv([&](std::ostream& out) { write_monthly_csv(monthly, out); }));
    if (holes) write_atomic(config.out_dir, "holes.json", dump(holes_doc(*holes)));
}

void cmd_identify(const PipelineConfig& config) {
    const MonthlySeries monthly = load_input(config);
    const Prepared prep = prepare(monthly, config, false);
    const IdentifyOutput ident = identify_series(prep.series, config);
    write_atomic(config.out_dir, "acf_pacf.csv", capture_csv([&](std::ostream& out) {
                     write_correlogram_csv(ident.gram, out);
                 }));
    write_atomic(config.out_dir, "identify.json", dump(ident.summary));
}

void cmd_impute(const PipelineConfig& config) {
    const MonthlySeries monthly = load_input(config);
    const Prepared prep = prepare(monthly, config, /*always_impute=*/true);
    const MonthlySeries imputed =
        to_monthly(prep.series, monthly.start_year, monthly.start_month);
    write_atomic(config.out_dir, "monthly.csv",
                 capture_csv([&](std::ostream& out) { write_monthly_csv(imputed, out); }));
    nlohmann::json report =
        nlohmann::json::parse(imputation_report_json(*prep.imputation));
    if (prep.holes) report["punctures"] = holes_doc(*prep.holes);
    write_atomic(config.out_dir, "imputation.json", dump(report));
}

void cmd_fit(const PipelineConfig& config) {
    const MonthlySeries monthly = load_input(config);
    const ModelChain chain = fit_chain(monthly, config);
    write_atomic(config.out_dir, "model.json",
                 dump(model_doc(chain.model, chain.trans)));
}

void cmd_diagnose(const PipelineConfig& config) {
    const MonthlySeries monthly = load_input(config);
    const ModelChain chain = fit_chain(monthly, config);
    const AdequacyReport report =
        stage_guard(Stage::Diagnose, [&] { return adequacy_report(chain.model); });
    write_atomic(config.out_dir, "diagnostics.json",
                 dump(nlohmann::json::parse(adequacy_json(report))));
    write_atomic(config.out_dir, "residual_acf.csv", capture_csv([&](std::ostream& out) {
                     residual_acf_csv(report, out);
                 }));
}

void cmd_forecast(const PipelineConfig& config) {
    const MonthlySeries monthly = load_input(config);
    const ModelChain chain = fit_chain(monthly, config);
    const ForecastResult fc = stage_guard(Stage::Diagnose, [&] {
        return forecast(chain.model, chain.trans.transformed, config.horizon,
                        config.level);
    });
    write_atomic(config.out_dir, "forecast.csv",
                 capture_csv([&](std::ostream& out) { forecast_csv(fc, out); }));
}

void cmd_evaluate(const PipelineConfig& config) {
    const MonthlySeries monthly = load_input(config);
    const ModelChain chain = fit_chain(monthly, config);
    const EvaluationReport report = stage_guard(Stage::Diagnose, [&] {
        const AlignedErrors errors =
            in_sample_errors(chain.model, chain.trans.transformed);
        return evaluate(series_label(monthly), errors.model, errors.naive);
    });
    write_atomic(config.out_dir, "evaluation.json",
                 dump(nlohmann::json::parse(evaluation_json(report))));
}

void cmd_run(const PipelineConfig& config) {
    const MonthlySeries monthly = load_input(config);

    // Artifacts are written as each stage completes, so a failing run
    // still leaves every earlier report intact.
    const Prepared prep = prepare(monthly, config, false);
    const MonthlySeries ready =
        to_monthly(prep.series, monthly.start_year, monthly.start_month);
    write_atomic(config.out_dir, "monthly.csv",
                 capture_csv([&](std::ostream& out) { write_monthly_csv(ready, out); }));
    if (prep.imputation) {
        nlohmann::json report =
            nlohmann::json::parse(imputation_report_json(*prep.imputation));
        if (prep.holes) report["punctures"] = holes_doc(*prep.holes);
        write_atomic(config.out_dir, "imputation.json", dump(report));
    }

    const IdentifyOutput ident = identify_series(prep.series, config);
    write_atomic(config.out_dir, "acf_pacf.csv", capture_csv([&](std::ostream& out) {
                     write_correlogram_csv(ident.gram, out);
                 }));

    const Transformed trans = apply_transforms(prep.series, config);
    const FittedModel model = stage_guard(Stage::Fit, [&] {
        return fit(trans.working, config.order, trans.include_mean);
    });
    write_atomic(config.out_dir, "model.json", dump(model_doc(model, trans)));

    const AdequacyReport adequacy =
        stage_guard(Stage::Diagnose, [&] { return adequacy_report(model); });
    write_atomic(config.out_dir, "diagnostics.json",
                 dump(nlohmann::json::parse(adequacy_json(adequacy))));
    write_atomic(config.out_dir, "residual_acf.csv", capture_csv([&](std::ostream& out) {
                     residual_acf_csv(adequacy, out);
                 }));

    const ForecastResult fc = stage_guard(Stage::Diagnose, [&] {
        return forecast(model, trans.transformed, config.horizon, config.level);
    });
    write_atomic(config.out_dir, "forecast.csv",
                 capture_csv([&](std::ostream& out) { forecast_csv(fc, out); }));

    const EvaluationReport eval = stage_guard(Stage::Diagnose, [&] {
        const AlignedErrors errors = in_sample_errors(model, trans.transformed);
        return evaluate(series_label(monthly), errors.model, errors.naive);
    });
    write_atomic(config.out_dir, "evaluation.json",
                 dump(nlohmann::json::parse(evaluation_json(eval))));
}

void cmd_compare(const PipelineConfig& config) {
    if (!config.holes)
        throw PipelineError(Stage::Parse,
                            "compare requires --holes (use --holes 0 for a "
                            "degenerate comparison)");
    const MonthlySeries monthly = load_input(config);

    PipelineConfig complete_cfg = config;
    complete_cfg.holes.reset();

    std::optional<BranchArtifacts> complete, missing;
    std::optional<PipelineError> first_error;
    auto attempt = [&](const PipelineConfig& cfg, const std::string& label,
                       std::optional<BranchArtifacts>& slot) {
        try {
            slot = run_branch(monthly, cfg, label);
        } catch (const PipelineError& e) {
            if (!first_error) first_error = e;
            return nlohmann::json{
                {"error",
                 {{"stage", static_cast<int>(e.stage)}, {"message", e.what()}}}};
        }
        return branch_doc(*slot);
    };

    nlohmann::json doc;
    doc["config"] = config_doc(config);
    doc["complete"] = attempt(complete_cfg, "complete", complete);
    doc["missing"] = attempt(config, "missing", missing);
    if (missing && missing->chain.prep.holes)
        doc["holes"] = holes_doc(*missing->chain.prep.holes);
    else
        doc["holes"] = {{"count", *config.holes}, {"seed", config.seed}};
    if (complete && missing) {
        const double u_complete = complete->eval.theil_u;
        const double u_missing = missing->eval.theil_u;
        doc["summary"] = {{"theil_u_complete", u_complete},
                          {"theil_u_missing", u_missing},
                          {"theil_u_abs_difference", std::abs(u_complete - u_missing)}};
    }
    write_atomic(config.out_dir, "compare.json", dump(doc));
    if (first_error) throw *first_error;
}

void cmd_simulate(const PipelineConfig& config) {
    const Series sim = stage_guard(Stage::Parse, [&] {
        std::vector<double> params = config.sim_coefficients;
        const bool include_mean = config.sim_mean.has_value();
        if (include_mean) params.push_back(*config.sim_mean);
        config.order.validate(include_mean);
        return simulate_sarima(config.order, params, include_mean, config.sim_sigma,
                               config.sim_length, config.seed);
    });
    MonthlySeries out = to_monthly(sim, config.sim_start_year, config.sim_start_month);
    out.label = "simulated";
    write_atomic(config.out_dir, "simulated.csv",
                 capture_csv([&](std::ostream& o) { write_monthly_csv(out, o); }));
}

}  // namespace

void PipelineConfig::validate() const {
    auto fail = [](const std::string& msg) {
        throw PipelineError(Stage::Parse, msg);
    };
    if (order.p < 0 || order.d < 0 || order.q < 0 || order.P < 0 || order.D < 0 ||
        order.Q < 0)
        fail("order fields must be non-negative");
    if (order.s < 1) fail("s must be positive");
    if (!(level > 0.0 && level < 1.0)) fail("level must lie in (0,1)");
    if (horizon < 1) fail("horizon must be >= 1");
    if (window < 0) fail("M must be >= 0");
    if (phi && !(*phi > 0.0 && *phi < 1.0)) fail("phi must lie in (0,1)");
    if (impute_strategy != "filter") {
        try {
            baseline_strategy_from_name(impute_strategy);
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }
    if (sim_sigma < 0.0) fail("sigma must be >= 0");
    if (sim_length < 1) fail("simulation length must be >= 1");
    if (sim_start_month < 1 || sim_start_month > 12)
        fail("start month must lie in 1..12");
}

void run_command(const std::string& name, const PipelineConfig& config) {
    config.validate();
    if (name == "ingest")
        cmd_ingest(config);
    else if (name == "identify")
        cmd_identify(config);
    else if (name == "impute")
        cmd_impute(config);
    else if (name == "fit")
        cmd_fit(config);
    else if (name == "diagnose")
        cmd_diagnose(config);
    else if (name == "forecast")
        cmd_forecast(config);
    else if (name == "evaluate")
        cmd_evaluate(config);
    else if (name == "run")
        cmd_run(config);
    else if (name == "compare")
        cmd_compare(config);
    else if (name == "simulate")
        cmd_simulate(config);
    else
        throw PipelineError(Stage::Parse, "unknown command `" + name + "`");
}

int run_command_exit_code(const std::string& name, const PipelineConfig& config,
                          std::ostream& err) {
    try {
        run_command(name, config);
        return 0;
    } catch (const PipelineError& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace raincast
