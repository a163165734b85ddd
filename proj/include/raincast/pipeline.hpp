#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "raincast/evaluate.hpp"
#include "raincast/filter_impute.hpp"
#include "raincast/ingest.hpp"
#include "raincast/sarima.hpp"

namespace raincast {

// Which phase of the pipeline failed; the numeric value is the process
// exit code. Imputation, transforms and identification share the
// transform code; forecasting and evaluation share the diagnose code
// (post-estimation analysis).
enum class Stage : int {
    Parse = 1,
    Transform = 2,
    Fit = 3,
    Diagnose = 4,
    Io = 5,
};

class PipelineError : public std::runtime_error {
public:
    PipelineError(Stage stage, const std::string& msg)
        : std::runtime_error(msg), stage(stage) {}
    Stage stage;
    int exit_code() const { return static_cast<int>(stage); }
};

// Everything a batch command needs, collected from flags and the
// optional flat config file (flags win).
struct PipelineConfig {
    std::string input;       // daily, monthly, or plain series CSV
    std::string out_dir = ".";

    ModelOrder order;        // s doubles as the seasonal period everywhere
    bool log = true;
    std::optional<double> log_offset;

    std::optional<double> phi;  // filter base; estimated from data when absent
    int window = 12;            // filter M
    std::string impute_strategy = "filter";
    bool prefilter = false;          // run the moving average over the whole series
    bool unnormalized_filter = false;

    std::optional<std::size_t> holes;  // puncture count; present = configured
    std::uint64_t seed = 0;

    int horizon = 12;
    double level = 0.95;
    bool force_mean = false;
    bool identify_differenced = false;  // correlogram of the differenced series
    MonthDivisor divisor = MonthDivisor::CalendarDays;

    // Simulation-only knobs.
    std::vector<double> sim_coefficients;
    std::optional<double> sim_mean;
    double sim_sigma = 1.0;
    int sim_length = 432;
    int sim_start_year = 1969;
    unsigned sim_start_month = 1;

    void validate() const;  // throws PipelineError(Parse) on bad fields
};

// Executes one subcommand ("ingest", "identify", "impute", "fit",
// "diagnose", "forecast", "evaluate", "run", "compare", "simulate"),
// writing reports into config.out_dir. Throws PipelineError on
// failure; a compare with one failed branch still writes the partial
// report before throwing.
void run_command(const std::string& name, const PipelineConfig& config);

// run_command with the error path folded into an exit code and a
// one-line message on the given stream.
int run_command_exit_code(const std::string& name, const PipelineConfig& config,
                          std::ostream& err);

}  // namespace raincast
