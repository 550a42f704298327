#include "oqw/harness.hpp"

#include "oqw/equilibrium.hpp"
#include "oqw/linear_model.hpp"
#include "oqw/thermalization.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace oqw::harness {

namespace {

namespace eq = oqw::equilibrium;
namespace th = oqw::thermalization;

// Runs fn(i) for i in [0, count) on up to `jobs` threads; results keep index order.
template <typename Fn>
auto parallel_map(unsigned jobs, std::size_t count, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
    std::vector<decltype(fn(std::size_t{}))> results(count);
    const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    results[i] = fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

void append(Table& table, std::vector<std::vector<double>> rows) {
    for (auto& r : rows) table.rows.push_back(std::move(r));
}

double single_omega(const RunConfig& config) {
    if (config.omegas.size() != 1) {
        throw ValidationError(std::string(mode_name(config.mode)) + " takes a single --omega value");
    }
    return config.omegas.front();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << content;
    file.flush();
    if (!file) throw IoError("failed writing '" + path + "'");
}

void emit(const RunConfig& config, const std::string& content, std::ostream& out) {
    if (config.out) {
        write_file(*config.out, content);
    } else {
        out << content;
    }
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_number(const std::string& cell) {
    if (cell == "inf") return std::numeric_limits<double>::infinity();
    if (cell == "-inf") return -std::numeric_limits<double>::infinity();
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    // strtod rather than stod: subnormal values are valid output.
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw std::invalid_argument("parse_csv: bad number '" + cell + "'");
    }
    return v;
}

}  // namespace

std::string_view mode_name(Mode mode) {
    switch (mode) {
        case Mode::steady_state: return "steady-state";
        case Mode::equilibrium: return "equilibrium";
        case Mode::trajectory: return "trajectory";
        case Mode::window: return "window";
        case Mode::approx_entropy: return "approx-entropy";
        case Mode::table: return "table";
        case Mode::dqc: return "dqc";
    }
    return "unknown";
}

void RunConfig::validate() const {
    if (n_nodes < 2) throw ValidationError("--n-nodes must be at least 2");
    if (omegas.empty()) throw ValidationError("--omega produced no values");
    for (const double w : omegas) {
        if (!(w > 0.0 && w < 1.0)) throw ValidationError("--omega values must lie strictly inside (0, 1)");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("--epsilon must be positive");
    if (jobs == 0) throw ValidationError("--jobs must be at least 1");
    if (temperature_half_width == 0) throw ValidationError("--temperature-window must be at least 1");
    if (!(cutoff_sigmas > 0.0)) throw ValidationError("--cutoff-sigmas must be positive");
    if (dump_distributions && mode != Mode::trajectory) {
        throw ValidationError("--dump-distributions only applies to trajectory");
    }
    if (dump_distributions && !out) throw ValidationError("--dump-distributions requires --out");

    const auto need_drift = [&] {
        for (const double w : omegas) {
            if (!(w > 0.5)) {
                throw ValidationError(std::string(mode_name(mode)) + " requires --omega > 1/2");
            }
        }
    };
    switch (mode) {
        case Mode::trajectory:
            single_omega(*this);
            break;
        case Mode::approx_entropy:
            single_omega(*this);
            need_drift();
            if (steps < 1) throw ValidationError("--steps must be at least 1");
            break;
        case Mode::table:
        case Mode::dqc:
            need_drift();
            break;
        case Mode::window:
            for (const double w : omegas) {
                if (w == 0.5) throw ValidationError("window is undefined at omega = 1/2 (no drift)");
            }
            break;
        case Mode::steady_state:
        case Mode::equilibrium:
            break;
    }
}

std::vector<double> parse_omega(std::string_view text) {
    auto to_double = [](std::string_view s) {
        const std::string str(s);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(str, &used);
        } catch (const std::exception&) {
            throw ValidationError("--omega: cannot parse '" + str + "'");
        }
        if (used != str.size()) throw ValidationError("--omega: cannot parse '" + str + "'");
        return v;
    };
    const auto first = text.find(':');
    if (first == std::string_view::npos) return {to_double(text)};
    const auto second = text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        throw ValidationError("--omega range must be start:stop:step");
    }
    const double start = to_double(text.substr(0, first));
    const double stop = to_double(text.substr(first + 1, second - first - 1));
    const double step = to_double(text.substr(second + 1));
    if (!(step > 0.0) || !(stop >= start)) throw ValidationError("--omega range needs step > 0 and stop >= start");
    std::vector<double> values;
    const double tol = 1e-9 * step;
    for (std::size_t k = 0;; ++k) {
        const double v = start + static_cast<double>(k) * step;
        if (v > stop + tol) break;
        values.push_back(v);
        if (values.size() > 1000000) throw ValidationError("--omega range has too many points");
    }
    return values;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& table) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const double v = row[c];
            if (std::isfinite(v)) {
                obj[table.columns[c]] = v;
            } else {
                obj[table.columns[c]] = format_number(v);
            }
        }
        rows.push_back(std::move(obj));
    }
    return rows.dump(2) + "\n";
}

std::string serialize(const Table& table, Format format) {
    return format == Format::csv ? to_csv(table) : to_json(table);
}

Table parse_csv(std::string_view text) {
    Table table;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (header) {
            table.columns = std::move(cells);
            header = false;
            continue;
        }
        if (cells.size() != table.columns.size()) throw std::invalid_argument("parse_csv: ragged row");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_number(c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table steady_state_table(const RunConfig& config) {
    const bool sweep = config.omegas.size() > 1;
    Table table;
    table.columns = sweep ? std::vector<std::string>{"omega", "m", "pi"} : std::vector<std::string>{"m", "pi"};
    auto cells = parallel_map(config.jobs, config.omegas.size(), [&](std::size_t i) {
        const double w = config.omegas[i];
        const auto pi = steady_state(LinearWalkSpec(config.n_nodes, w, config.epsilon));
        std::vector<std::vector<double>> rows;
        rows.reserve(pi.size());
        for (std::size_t m = 0; m < pi.size(); ++m) {
            if (sweep) {
                rows.push_back({w, static_cast<double>(m), pi[m]});
            } else {
                rows.push_back({static_cast<double>(m), pi[m]});
            }
        }
        return rows;
    });
    for (auto& c : cells) append(table, std::move(c));
    return table;
}

Table equilibrium_table(const RunConfig& config) {
    Table table;
    table.columns = {"omega", "beta", "T", "Z", "E", "varE", "S", "F", "Cv"};
    table.rows = parallel_map(config.jobs, config.omegas.size(), [&](std::size_t i) {
        const double w = config.omegas[i];
        const auto point = eq::EnsemblePoint::from_omega(config.n_nodes, w, config.epsilon);
        const auto t = eq::thermo(point);
        return std::vector<double>{w, point.beta(), t.T, t.Z, t.mean_E, t.var_E, t.S, t.F, t.C_V};
    });
    return table;
}

Table window_table(const RunConfig& config) {
    Table table;
    table.columns = {"omega", "t_start", "t_end", "t_therm"};
    for (const double w : config.omegas) {
        // The window of omega < 1/2 is that of the mirrored walk.
        const auto win = th::thermalization_window(config.n_nodes, w > 0.5 ? w : 1.0 - w);
        table.rows.push_back({w, win.t_start, win.t_end, win.t_therm});
    }
    return table;
}

Table approx_entropy_table(const RunConfig& config) {
    const double w = single_omega(config);
    const LinearWalkSpec spec(config.n_nodes, w, config.epsilon);
    const auto params = th::approx_entropy_params(spec, config.cutoff_sigmas);
    const auto traj = th::simulate_trajectory(spec, config.steps);
    Table table;
    table.columns = {"t", "S", "S_a", "S_G", "S_B", "w"};
    for (std::size_t t = 1; t <= config.steps; ++t) {
        const auto a = th::approx_entropy(spec, params, static_cast<double>(t));
        table.rows.push_back({static_cast<double>(t), traj.entropy[t], a.total, a.gaussian, a.boltzmann, a.weight});
    }
    return table;
}

Table dqc_table(const RunConfig& config) {
    Table table;
    table.columns = {"N", "omega", "n_start", "n_steps", "n_end", "E_steady", "dE_domega"};
    for (const double w : config.omegas) {
        const auto est = th::dqc_step_estimates(config.n_nodes, w);
        const auto point = eq::EnsemblePoint::from_omega(config.n_nodes, w, config.epsilon);
        table.rows.push_back({static_cast<double>(config.n_nodes), w, est.n_start, est.n_steps, est.n_end,
                              eq::mean_energy(point), eq::energy_cost_domega(point)});
    }
    return table;
}

TrajectoryTables trajectory_tables(const RunConfig& config) {
    const double w = single_omega(config);
    const LinearWalkSpec spec(config.n_nodes, w, config.epsilon);
    th::TrajectoryOptions options;
    options.temperature_half_width = config.temperature_half_width;
    options.keep_distributions = config.dump_distributions;
    const auto traj = th::simulate_trajectory(spec, config.steps, options);

    TrajectoryTables out;
    out.series.columns = {"n", "S", "E", "T_est", "S_gen"};
    for (std::size_t n = 0; n <= traj.steps(); ++n) {
        out.series.rows.push_back({static_cast<double>(n), traj.entropy[n], traj.energy[n], traj.temperature[n],
                                   traj.entropy_generated[n]});
    }
    if (config.dump_distributions) {
        Table dist;
        dist.columns = {"n", "m", "p"};
        for (std::size_t n = 0; n < traj.distributions.size(); ++n) {
            for (std::size_t m = 0; m < traj.distributions[n].size(); ++m) {
                dist.rows.push_back({static_cast<double>(n), static_cast<double>(m), traj.distributions[n][m]});
            }
        }
        out.distributions = std::move(dist);
    }
    return out;
}

Table error_table(const RunConfig& config) {
    Table table;
    table.columns = {"N",          "omega",         "t_start",  "t_end",          "delta_max",
                     "delta_rel_max", "mean_rel", "delta_logN_max", "mean_logN"};
    table.rows = parallel_map(config.jobs, config.omegas.size(), [&](std::size_t i) {
        const double w = config.omegas[i];
        const LinearWalkSpec spec(config.n_nodes, w, config.epsilon);
        const auto window = th::thermalization_window(config.n_nodes, w);
        const auto steps = static_cast<std::size_t>(std::floor(window.t_end)) + 1;
        const auto traj = th::simulate_trajectory(spec, steps);
        const auto m = th::error_metrics(spec, traj.entropy, th::approx_entropy_params(spec, config.cutoff_sigmas));
        return std::vector<double>{static_cast<double>(config.n_nodes), w, window.t_start, window.t_end,
                                   m.delta_max, m.delta_rel_max, m.mean_rel, m.delta_log_n_max, m.mean_log_n};
    });
    return table;
}

std::string describe_error_table(const Table& table) {
    std::ostringstream out;
    const char* labels[] = {"delta_max", "delta_rel,max", "mean delta_rel", "delta_logN,max", "mean delta_logN"};
    for (const auto& row : table.rows) {
        out << "N = " << format_number(row[0]) << ", omega = " << std::setprecision(6) << row[1]
            << ", window [" << std::fixed << std::setprecision(2) << row[2] << ", " << row[3] << "]\n";
        out << std::defaultfloat;
        out << std::left << std::setw(18) << "Metric" << "Value\n";
        for (std::size_t k = 0; k < 5; ++k) {
            out << std::left << std::setw(18) << labels[k] << std::fixed << std::setprecision(4) << row[4 + k]
                << '\n';
            out << std::defaultfloat;
        }
    }
    return out.str();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.validate();
        switch (config.mode) {
            case Mode::steady_state: emit(config, serialize(steady_state_table(config), config.format), out); break;
            case Mode::equilibrium: emit(config, serialize(equilibrium_table(config), config.format), out); break;
            case Mode::window: emit(config, serialize(window_table(config), config.format), out); break;
            case Mode::approx_entropy:
                emit(config, serialize(approx_entropy_table(config), config.format), out);
                break;
            case Mode::dqc: emit(config, serialize(dqc_table(config), config.format), out); break;
            case Mode::trajectory: {
                const auto tables = trajectory_tables(config);
                emit(config, serialize(tables.series, config.format), out);
                if (tables.distributions) {
                    const std::string ext = config.format == Format::csv ? ".dist.csv" : ".dist.json";
                    write_file(*config.out + ext, serialize(*tables.distributions, config.format));
                }
                break;
            }
            case Mode::table: {
                const auto table = error_table(config);
                out << describe_error_table(table);
                if (config.out) write_file(*config.out, serialize(table, config.format));
                break;
            }
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace oqw::harness
