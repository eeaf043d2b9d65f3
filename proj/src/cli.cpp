#include "heatwave/cli.hpp"

#include "heatwave/config.hpp"
#include "heatwave/errors.hpp"
#include "heatwave/mesh.hpp"
#include "heatwave/verify.hpp"

#include <CLI11.hpp>

#include <map>
#include <ostream>

namespace heatwave {

namespace {

const std::vector<std::pair<std::string, std::string>>& subcommands()
{
    static const std::vector<std::pair<std::string, std::string>> list{
        {"solve", "single dG(q)cG(r) solve with residual diagnostics"},
        {"conv", "gradient error convergence study"},
        {"best-approx", "global best-approximation ratio"},
        {"interior", "interior estimate with a remote kink"},
        {"resolvent", "weighted resolvent norms over sector scans"},
        {"maxreg", "discrete maximal parabolic regularity sums"},
        {"greens", "weighted norms of the discrete Green function"},
        {"lemmas", "elliptic lemma suite"},
        {"lemma42", "complex inequality sampling"},
        {"mesh", "write a structured unit-square mesh"},
    };
    return list;
}

void print_checks(const ExperimentReport& rep, std::ostream& out)
{
    for (const auto& c : rep.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << fmt17(c.value) << (c.upper ? " <= " : " >= ")
            << fmt17(c.threshold);
        if (!c.detail.empty()) {
            out << " (" << c.detail << ")";
        }
        out << "\n";
    }
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"space-time finite element engine for the heat equation and its verification harness", "heatwave"};
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> flags;
    std::map<std::string, std::string> config_paths;
    for (const auto& [name, help] : subcommands()) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_paths[name], "config file (key = value with [sections])");
        for (const auto& f : config_fields()) {
            sub->add_option("--" + kebab(f.key), flags[name][f.key], f.help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    RunConfig cfg;
    ExperimentReport rep;
    try {
        if (!config_paths[name].empty()) {
            apply_config_file(cfg, config_paths[name]);
        }
        for (const auto& f : config_fields()) {
            if (sub->count("--" + kebab(f.key)) > 0) {
                f.set(cfg, flags[name][f.key]);
            }
        }
        if (name == "mesh") {
            const int n = cfg.n.empty() ? 1 : cfg.n.front();
            save_mesh(generate_unit_square(n), cfg.out);
            out << "wrote " << cfg.out << "\n";
            return kExitOk;
        }
        rep = run_experiment(name, cfg);
        emit(rep, cfg.output_dir);
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    print_checks(rep, out);
    out << "report written to " << cfg.output_dir << "\n";
    return rep.all_passed() ? kExitOk : kExitCheckFailed;
}

} // namespace heatwave
