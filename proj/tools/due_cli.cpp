#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "due/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dynamic user equilibrium with elastic demand"};
    app.require_subcommand(1);

    due::cli::Request req;
    std::string format;

    auto add_verb = [&](const char* name, const char* help, due::cli::Command cmd) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("scenario", req.scenario, "Scenario JSON file")->required();
        sub->add_option("--out", req.out_dir, "Output directory for the report");
        sub->add_option("--format", format, "Report format: json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", req.seed, "Seed for the oracle's random starts (recorded in the report)");
        sub->callback([&req, cmd] { req.command = cmd; });
    };
    add_verb("solve", "Solve for the equilibrium and write a report", due::cli::Command::solve);
    add_verb("validate", "Check a scenario and its network without solving", due::cli::Command::validate);
    add_verb("oracle", "Run the brute-force reference solver", due::cli::Command::oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : due::cli::kValidationError;
    }
    if (!format.empty())
        req.format = due::parse_report_format(format);
    return due::cli::run_scenario(req, std::cout, std::cerr);
}
