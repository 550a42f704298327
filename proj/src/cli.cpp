#include "oqw/harness.hpp"

#include <CLI11.hpp>

#include <exception>
#include <ostream>
#include <string>
#include <thread>

namespace oqw::harness {

namespace {

struct Subcommand {
    Mode mode;
    const char* help;
};

constexpr Subcommand kSubcommands[] = {
    {Mode::steady_state, "steady-state distribution pi_m per omega"},
    {Mode::equilibrium, "equilibrium thermodynamics per omega"},
    {Mode::trajectory, "exact trajectory from node 0: S, E, T_est, S_gen per step"},
    {Mode::window, "thermalization window per omega"},
    {Mode::approx_entropy, "exact S(t) against the Gaussian + Boltzmann approximation"},
    {Mode::table, "error metrics of the entropy approximation over the window"},
    {Mode::dqc, "step estimates and energy bookkeeping for dissipative computation"},
};

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linear open quantum walk thermodynamics", "oqw"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; command-line flags take precedence");

    RunConfig config;
    config.jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string omega_text = "0.6666666666666666";
    std::string format_text = "csv";
    std::string out_path;

    app.add_option("--n-nodes", config.n_nodes, "number of nodes N")->capture_default_str();
    app.add_option("--omega", omega_text, "omega, or start:stop:step (stop inclusive)")->capture_default_str();
    app.add_option("--epsilon", config.epsilon, "level spacing")->capture_default_str();
    app.add_option("--steps", config.steps, "number of walk steps")->capture_default_str();
    app.add_option("--format", format_text, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--jobs", config.jobs, "worker threads for sweeps")->capture_default_str();
    app.add_flag("--dump-distributions", config.dump_distributions,
                 "trajectory: also write n,m,p to <out>.dist.<format>");
    app.add_option("--cutoff-sigmas", config.cutoff_sigmas, "approximation cutoff N' = N - k sigma")
        ->capture_default_str();
    app.add_option("--temperature-window", config.temperature_half_width,
                   "half-width in steps of the T_est difference")
        ->capture_default_str();

    std::vector<CLI::App*> subs;
    for (const auto& s : kSubcommands) {
        auto* sub = app.add_subcommand(std::string(mode_name(s.mode)), s.help);
        sub->fallthrough();
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::FileError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (subs[i]->parsed()) config.mode = kSubcommands[i].mode;
    }
    config.format = format_text == "json" ? Format::json : Format::csv;
    if (!out_path.empty()) config.out = out_path;
    try {
        config.omegas = parse_omega(omega_text);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return run(config, out, err);
}

}  // namespace oqw::harness
