// Batch front-end: every subcommand reads one input CSV (daily,
// monthly, or plain series format, sniffed from the header) and writes
// its reports into the output directory. A flat key=value config file
// can seed any option; explicit flags win.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "raincast/pipeline.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
}

raincast::ModelOrder parse_order(const std::string& text, int s) {
    const auto parts = split_commas(text);
    if (parts.size() != 6)
        throw std::runtime_error("--order expects six comma-separated integers "
                                 "p,d,q,P,D,Q (got `" + text + "`)");
    int vals[6];
    for (int i = 0; i < 6; ++i) {
        try {
            std::size_t pos = 0;
            vals[i] = std::stoi(parts[i], &pos);
            if (pos != parts[i].size()) throw std::invalid_argument(parts[i]);
        } catch (const std::exception&) {
            throw std::runtime_error("--order component `" + parts[i] +
                                     "` is not an integer");
        }
    }
    raincast::ModelOrder order;
    order.p = vals[0];
    order.d = vals[1];
    order.q = vals[2];
    order.P = vals[3];
    order.D = vals[4];
    order.Q = vals[5];
    order.s = s;
    return order;
}

std::vector<double> parse_coefficients(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split_commas(text)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(part, &pos));
            if (pos != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw std::runtime_error("--coeffs component `" + part +
                                     "` is not a number");
        }
    }
    return out;
}

// ---- flat key=value config files -----------------------------------

void trim(std::string& t) {
    const char* ws = " \t\r";
    const auto b = t.find_first_not_of(ws);
    const auto e = t.find_last_not_of(ws);
    t = b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file `" + path + "`");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config file line " + std::to_string(lineno) +
                                     ": expected key=value, got `" + line + "`");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        trim(key);
        trim(value);
        if (key.empty())
            throw std::runtime_error("config file line " + std::to_string(lineno) +
                                     ": empty key");
        kv[key] = value;
    }
    return kv;
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int r = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw std::runtime_error("config key `" + key + "` expects an integer, got `" +
                                 v + "`");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw std::runtime_error("config key `" + key + "` expects a number, got `" +
                                 v + "`");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(r);
    } catch (const std::exception&) {
        throw std::runtime_error("config key `" + key +
                                 "` expects a non-negative integer, got `" + v + "`");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config key `" + key + "` expects true/false, got `" +
                             v + "`");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seasonal ARIMA workbench: aggregate daily records, fill missing "
                 "months, identify/fit/diagnose a model, forecast, and compare "
                 "complete against punctured data"};
    app.require_subcommand(1);

    raincast::PipelineConfig config;
    std::string config_path, order_text, coeffs_text;
    std::string divisor_name = "calendar";
    double offset = 0.0, phi = 0.0, mean_value = 0.0;
    bool mean_from_config = false;
    std::size_t holes = 0;
    int season = 12;
    int start_month = 1;
    // need_input / need_order per subcommand; enforced after the config
    // file merge so either source can satisfy them.
    std::map<const CLI::App*, std::pair<bool, bool>> requirements;

    auto add_common = [&](CLI::App* sub, bool need_input, bool need_order) {
        requirements[sub] = {need_input, need_order};
        sub->add_option("--config", config_path,
                        "flat key=value config file; explicit flags win");
        sub->add_option("--input", config.input, "input CSV (daily "
                        "`date,value`, monthly `year,month,value,observed`, "
                        "or series `index,value,observed`)");
        sub->add_option("--out", config.out_dir, "output directory for reports")
            ->capture_default_str();
        sub->add_option("--order", order_text,
                        "model order p,d,q,P,D,Q (e.g. 1,0,0,0,1,1)");
        sub->add_option("--s", season, "season length")->capture_default_str();
        sub->add_flag("--log,!--no-log", config.log,
                      "log-transform before differencing (default on)");
        sub->add_option("--offset", offset,
                        "add this offset before the log (for zero months)");
        sub->add_option("--phi", phi, "filter correlation base in (0,1); "
                        "estimated from the data when omitted");
        sub->add_option("--M", config.window, "filter window length")
            ->capture_default_str();
        sub->add_option("--impute-strategy", config.impute_strategy,
                        "how to fill missing months")
            ->check(CLI::IsMember({"filter", "mean", "naive", "trend", "bounding",
                                   "bounding_average"}))
            ->capture_default_str();
        sub->add_flag("--prefilter", config.prefilter,
                      "run the weighted moving average over the whole series "
                      "before modeling");
        sub->add_flag("--unnormalized-filter", config.unnormalized_filter,
                      "use raw phi-power weights in --prefilter (comparison runs)");
        sub->add_option("--holes", holes,
                        "puncture this many observed months before imputation");
        sub->add_option("--seed", config.seed, "seed for puncturing/simulation")
            ->capture_default_str();
        sub->add_option("--horizon", config.horizon, "forecast steps")
            ->capture_default_str();
        sub->add_option("--level", config.level, "forecast interval level in (0,1)")
            ->capture_default_str();
        sub->add_flag("--force-mean", config.force_mean,
                      "keep the mean term even when its t-test drops it");
        sub->add_flag("--differenced", config.identify_differenced,
                      "identify on the differenced series instead of the "
                      "transformed one");
        sub->add_option("--divisor", divisor_name,
                        "monthly-average divisor: calendar day count or only "
                        "days with readings")
            ->check(CLI::IsMember({"calendar", "present"}))
            ->capture_default_str();
        return sub;
    };

    add_common(app.add_subcommand("ingest", "aggregate the input to a monthly CSV "
                                            "(optionally punctured)"),
               true, false);
    add_common(app.add_subcommand("identify",
                                  "ACF/PACF correlogram with zero bands"),
               true, false);
    add_common(app.add_subcommand("impute", "fill missing months and report the "
                                            "fills"),
               true, false);
    add_common(app.add_subcommand("fit", "estimate the model by conditional least "
                                         "squares"),
               true, true);
    add_common(app.add_subcommand("diagnose", "portmanteau adequacy ladder on the "
                                              "residuals"),
               true, true);
    add_common(app.add_subcommand("forecast", "point forecasts with interval "
                                              "bounds"),
               true, true);
    add_common(app.add_subcommand("evaluate", "RMSE and Theil's U against the "
                                              "naive rule"),
               true, true);
    add_common(app.add_subcommand("run", "full pipeline, all reports"), true, true);
    add_common(app.add_subcommand("compare", "complete vs punctured+imputed "
                                             "pipelines side by side"),
               true, true);
    auto* simulate = add_common(
        app.add_subcommand("simulate", "generate a synthetic monthly series"),
        false, true);
    simulate->add_option("--coeffs", coeffs_text,
                         "coefficients ar..,ma..,sar..,sma.. matching --order");
    simulate->add_option("--sigma", config.sim_sigma, "shock standard deviation")
        ->capture_default_str();
    simulate->add_option("--n", config.sim_length, "series length")
        ->capture_default_str();
    simulate->add_option("--mean-value", mean_value,
                         "include a mean term with this value");
    simulate->add_option("--start-year", config.sim_start_year,
                         "calendar anchor year")
        ->capture_default_str();
    simulate->add_option("--start-month", start_month, "calendar anchor month")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        // Flag-given optionals first, so the config merge can see which
        // flags were set explicitly.
        if (sub->count("--offset") > 0) config.log_offset = offset;
        if (sub->count("--phi") > 0) config.phi = phi;
        if (sub->count("--holes") > 0) config.holes = holes;

        if (sub->count("--config") > 0) {
            // Options the command line did not set; writes go straight
            // into config (or the pending text fields) so flag wins.
            const auto absent = [&](const std::string& flag) {
                const CLI::Option* opt = sub->get_option_no_throw(flag);
                return opt == nullptr || opt->count() == 0;
            };
            for (const auto& [key, value] : read_config_file(config_path)) {
                if (key == "input") {
                    if (absent("--input")) config.input = value;
                } else if (key == "out") {
                    if (absent("--out")) config.out_dir = value;
                } else if (key == "order") {
                    if (absent("--order")) order_text = value;
                } else if (key == "s") {
                    if (absent("--s")) season = to_int(key, value);
                } else if (key == "log") {
                    if (absent("--log")) config.log = to_bool(key, value);
                } else if (key == "offset") {
                    if (absent("--offset")) config.log_offset = to_double(key, value);
                } else if (key == "phi") {
                    if (absent("--phi")) config.phi = to_double(key, value);
                } else if (key == "M") {
                    if (absent("--M")) config.window = to_int(key, value);
                } else if (key == "impute-strategy") {
                    if (absent("--impute-strategy")) config.impute_strategy = value;
                } else if (key == "prefilter") {
                    if (absent("--prefilter")) config.prefilter = to_bool(key, value);
                } else if (key == "unnormalized-filter") {
                    if (absent("--unnormalized-filter"))
                        config.unnormalized_filter = to_bool(key, value);
                } else if (key == "holes") {
                    if (absent("--holes"))
                        config.holes = static_cast<std::size_t>(to_u64(key, value));
                } else if (key == "seed") {
                    if (absent("--seed")) config.seed = to_u64(key, value);
                } else if (key == "horizon") {
                    if (absent("--horizon")) config.horizon = to_int(key, value);
                } else if (key == "level") {
                    if (absent("--level")) config.level = to_double(key, value);
                } else if (key == "force-mean") {
                    if (absent("--force-mean")) config.force_mean = to_bool(key, value);
                } else if (key == "differenced") {
                    if (absent("--differenced"))
                        config.identify_differenced = to_bool(key, value);
                } else if (key == "divisor") {
                    if (absent("--divisor")) {
                        if (value != "calendar" && value != "present")
                            throw std::runtime_error(
                                "config key `divisor` expects calendar or present");
                        divisor_name = value;
                    }
                } else if (key == "coeffs") {
                    if (absent("--coeffs")) coeffs_text = value;
                } else if (key == "sigma") {
                    if (absent("--sigma")) config.sim_sigma = to_double(key, value);
                } else if (key == "n") {
                    if (absent("--n")) config.sim_length = to_int(key, value);
                } else if (key == "mean-value") {
                    if (absent("--mean-value")) {
                        mean_value = to_double(key, value);
                        mean_from_config = true;
                    }
                } else if (key == "start-year") {
                    if (absent("--start-year"))
                        config.sim_start_year = to_int(key, value);
                } else if (key == "start-month") {
                    if (absent("--start-month")) start_month = to_int(key, value);
                } else {
                    throw std::runtime_error("config file: unknown key `" + key + "`");
                }
            }
        }

        const auto [need_input, need_order] = requirements[sub];
        if (need_input && config.input.empty())
            throw std::runtime_error("input CSV required: pass --input or set "
                                     "`input` in the config file");
        if (need_order && order_text.empty())
            throw std::runtime_error("model order required: pass --order or set "
                                     "`order` in the config file");

        config.order = order_text.empty() ? raincast::ModelOrder{}
                                          : parse_order(order_text, season);
        config.order.s = season;
        if (sub->get_name() == "simulate" &&
            (sub->count("--mean-value") > 0 || mean_from_config))
            config.sim_mean = mean_value;
        if (!coeffs_text.empty())
            config.sim_coefficients = parse_coefficients(coeffs_text);
        config.divisor = divisor_name == "present"
                             ? raincast::MonthDivisor::PresentDays
                             : raincast::MonthDivisor::CalendarDays;
        config.sim_start_month = static_cast<unsigned>(start_month);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    return raincast::run_command_exit_code(sub->get_name(), config, std::cerr);
}
