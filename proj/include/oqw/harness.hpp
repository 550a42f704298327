// harness.hpp - command-line front end: run configuration, the per-mode
// table builders and their CSV / JSON serialization.
//
// Everything is deterministic. Sweep cells may run on several threads, but
// rows are merged back in parameter order before anything is written.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oqw::harness {

enum class Mode { steady_state, equilibrium, trajectory, window, approx_entropy, table, dqc };
enum class Format { csv, json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Mode mode = Mode::steady_state;
    std::size_t n_nodes = 100;
    std::vector<double> omegas{2.0 / 3.0};
    double epsilon = 1.0;
    std::size_t steps = 1000;
    std::optional<std::string> out;
    Format format = Format::csv;
    unsigned jobs = 1;
    bool dump_distributions = false;
    double cutoff_sigmas = 4.0;
    std::size_t temperature_half_width = 5;

    /// Throws ValidationError if a parameter violates the preconditions of
    /// the selected mode.
    void validate() const;
};

std::string_view mode_name(Mode mode);

/// "0.6" or "start:stop:step" (stop inclusive, values start + k * step).
std::vector<double> parse_omega(std::string_view text);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// 17 significant digits; infinities as inf / -inf, NaN as nan.
std::string format_number(double value);
std::string to_csv(const Table& table);
/// Array of objects keyed by column; non-finite values become strings.
std::string to_json(const Table& table);
std::string serialize(const Table& table, Format format);

/// Parses the CSV produced by to_csv back into a Table.
Table parse_csv(std::string_view text);

Table steady_state_table(const RunConfig& config);
Table equilibrium_table(const RunConfig& config);
Table window_table(const RunConfig& config);
Table approx_entropy_table(const RunConfig& config);
Table dqc_table(const RunConfig& config);

struct TrajectoryTables {
    Table series;                       // n,S,E,T_est,S_gen
    std::optional<Table> distributions; // n,m,p
};
TrajectoryTables trajectory_tables(const RunConfig& config);

/// One row of error metrics per omega.
Table error_table(const RunConfig& config);
/// Human-readable Metric / Value listing of error_table rows.
std::string describe_error_table(const Table& table);

/// Validates and executes `config`, writing results to `config.out` or `out`.
/// Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argument parsing + run).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oqw::harness
