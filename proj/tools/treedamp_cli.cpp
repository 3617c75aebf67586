#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treedamp/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Energy-minimal damping of neutral-type delay systems on metric trees"};
    app.require_subcommand(1);

    treedamp::SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Solve the Cauchy problem for a given control");
    simulate->add_option("--config", sim.config, "Problem config (JSON)")->required()->check(CLI::ExistingFile);
    simulate->add_option("--control", sim.control, "Control file (JSON)")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", sim.out, "Output directory")->required();

    treedamp::DampArgs damp;
    int q = 0;
    double tol = 0.0;
    auto* damp_cmd = app.add_subcommand("damp", "Compute the energy-minimal damping control");
    damp_cmd->add_option("--config", damp.config, "Problem config (JSON)")->required()->check(CLI::ExistingFile);
    damp_cmd->add_option("--out", damp.out, "Output directory")->required();
    auto* q_opt = damp_cmd->add_option("--q", q, "Elements per delay interval");
    auto* tol_opt = damp_cmd->add_option("--tol", tol, "Relative optimality tolerance");

    treedamp::VerifyArgs ver;
    auto* verify = app.add_subcommand("verify", "Check a stored solution against the optimality conditions");
    verify->add_option("--config", ver.config, "Problem config (JSON)")->required()->check(CLI::ExistingFile);
    verify->add_option("--solution", ver.solution, "Directory written by damp")->required()->check(CLI::ExistingDirectory);

    treedamp::ConvergenceArgs conv;
    auto* convergence = app.add_subcommand("convergence", "Refinement study over several q");
    convergence->add_option("--config", conv.config, "Problem config (JSON)")->required()->check(CLI::ExistingFile);
    convergence->add_option("--q", conv.q, "Comma separated refinement levels")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : treedamp::exit_code::validation;
    }

    return treedamp::run_guarded(
        [&]() -> int {
            if (*simulate) return treedamp::cmd_simulate(sim, std::cout);
            if (*damp_cmd) {
                if (*q_opt) damp.q = q;
                if (*tol_opt) damp.tol = tol;
                return treedamp::cmd_damp(damp, std::cout);
            }
            if (*verify) return treedamp::cmd_verify(ver, std::cout);
            return treedamp::cmd_convergence(conv, std::cout);
        },
        std::cerr);
}
