#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Thermodynamic invariants of quasifuchsian punctured-torus groups"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qft_version()));

    cli::Invocation inv;
    struct Command {
        const char* name;
        const char* help;
        int (*run)(const cli::Invocation&);
    };
    const Command commands[] = {
        {"entropy", "critical exponent h of one representation", cli::cmd_entropy},
        {"manhattan", "Manhattan curve of a pair (--label rho,eta)", cli::cmd_manhattan},
        {"intersect", "pressure intersection and rigidity of a pair", cli::cmd_intersect},
        {"metric", "pressure form at a base point along a direction", cli::cmd_metric},
        {"scan", "entropy along a straight path in the trace chart", cli::cmd_scan},
        {"census", "conjugacy classes by translation length", cli::cmd_census},
        {"validate", "full invariant suite; exit 3 on any failure", cli::cmd_validate},
    };
    int (*selected)(const cli::Invocation&) = nullptr;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", inv.config_path, "JSON run configuration")->required();
        sub->add_option("--label", inv.label, "representation label, or rho,eta for pairs");
        sub->add_option("--out", inv.out_dir, "output directory (overrides output.directory)");
        sub->callback([&selected, run = c.run] { selected = run; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kConfigError;
    }
    try {
        return selected(inv);
    } catch (const cli::Failure& f) {
        std::cerr << "qfthermo: " << f.what() << "\n";
        return f.code();
    } catch (const std::exception& e) {
        std::cerr << "qfthermo: " << e.what() << "\n";
        return cli::kConfigError;
    }
}
