#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace shuntlab::cli;

    CLI::App app{"Digital vibration absorber analysis: tuning, delay stability, stabilization, simulation"};
    app.require_subcommand(1);
    RunRequest req;
    std::string config, out;
    int figure = 0;
    for (const std::string& name : analysis_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "scenario JSON file");
        sub->add_option("--out", out, "output directory (overrides output.dir)");
        sub->add_flag("--plot-scripts", req.plot_scripts, "also write gnuplot scripts");
        if (name == "reproduce")
            sub->add_option("--figure", figure, "figure number")->required();
        else
            sub->add_option("--figure", figure, "ignored outside reproduce");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    req.command = app.get_subcommands().front()->get_name();
    if (!config.empty()) req.config = config;
    if (!out.empty()) req.out = out;
    if (req.command == "reproduce") req.figure = figure;
    return run(req, std::cout, std::cerr);
}
