// benign_lab: command-line front end for the NTK / KRR / ReLU-network risk experiments.

#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <iostream>
#include <string>
#include <thread>

#include "benign/commands.hpp"
#include "benign/config.hpp"
#include "benign/errors.hpp"

namespace {

using benign::ExitCode;
namespace cmd = benign::commands;

int run(int argc, char** argv) {
    CLI::App app{"Risk-curve experiments for two-layer ReLU networks and NTK kernel ridge regression"};
    app.require_subcommand(1);

    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string config_path;
    int result = 0;

    cmd::SpectrumArgs spectrum_args;
    auto* spectrum = app.add_subcommand("spectrum", "Tabulate NTK operator eigenvalues and multiplicities");
    spectrum->add_option("--d", spectrum_args.d, "Sphere dimension (inputs in R^d)")->required();
    spectrum->add_option("--max-h", spectrum_args.max_h, "Largest harmonic order")->required();
    spectrum->add_option("--tol", spectrum_args.tol, "Relative tolerance of the even-order series");
    spectrum->add_option("--out", spectrum_args.out, "Output CSV path")->required();
    spectrum->callback([&] { result = cmd::cmd_spectrum(spectrum_args, std::cout); });

    cmd::KernelCheckArgs kc_args;
    auto* kernel_check = app.add_subcommand("kernel-check", "Monte-Carlo eigen-equation and Taylor checks");
    kernel_check->add_option("--d", kc_args.d, "Sphere dimension");
    kernel_check->add_option("--samples", kc_args.samples, "Monte-Carlo sample count");
    kernel_check->add_option("--seed", kc_args.seed, "Sampling seed");
    kernel_check->callback([&] { result = cmd::cmd_kernel_check(kc_args, std::cout); });

    const auto load = [&] { return benign::config::RunConfig::load(config_path); };

    auto* krr_sweep = app.add_subcommand("krr-sweep", "KRR empirical and excess risk across a gamma sweep");
    krr_sweep->add_option("--config", config_path, "Run configuration file")->required();
    krr_sweep->callback([&] { result = cmd::cmd_krr_sweep(load(), std::cout); });

    auto* nn_train = app.add_subcommand("nn-train", "Train one network and log its risk curve and diagnostics");
    nn_train->add_option("--config", config_path, "Run configuration file")->required();
    nn_train->callback([&] { result = cmd::cmd_nn_train(load(), std::cout); });

    auto* experiment = app.add_subcommand("experiment", "Risk curves over every (n, seed) cell plus crossings");
    experiment->add_option("--config", config_path, "Run configuration file")->required();
    experiment->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    experiment->callback([&] { result = cmd::cmd_experiment(load(), jobs, std::cout); });

    std::string curves_path;
    std::string crossings_out;
    auto* crossing = app.add_subcommand("crossing", "Crossing statistics from an existing curves CSV");
    crossing->add_option("--curves", curves_path, "Input curves CSV")->required();
    crossing->add_option("--out", crossings_out, "Output crossings CSV")->required();
    crossing->callback([&] { result = cmd::cmd_crossing(curves_path, crossings_out, std::cout); });

    auto* assumptions = app.add_subcommand("assumptions", "Evaluate parameter assumptions");
    assumptions->require_subcommand(1);
    benign::krr::AssumptionParams kp;
    auto* a_krr = assumptions->add_subcommand("krr", "Kernel ridge regression assumption clauses");
    a_krr->add_option("--eps", kp.eps)->required();
    a_krr->add_option("--delta", kp.delta)->required();
    a_krr->add_option("--gamma", kp.gamma)->required();
    a_krr->add_option("--d", kp.d)->required();
    a_krr->add_option("--n", kp.n)->required();
    a_krr->add_option("--f-eps-norm", kp.f_eps_norm, "RKHS norm of the approximating function")->required();
    a_krr->add_option("--C", kp.C, "Constant in the sample-vs-dimension clause");
    a_krr->callback([&] { result = cmd::cmd_assumptions_krr(kp, std::cout); });
    cmd::NnScheduleArgs np;
    auto* a_nn = assumptions->add_subcommand("nn", "Gradient-flow schedule quantities T_eps and U_eps");
    a_nn->add_option("--eps", np.eps)->required();
    a_nn->add_option("--d", np.d)->required();
    a_nn->add_option("--L-eps", np.L_eps, "Index into the eigenvalues counted with multiplicity");
    a_nn->add_option("--max-h", np.max_h, "Largest harmonic order in the spectrum");
    a_nn->callback([&] { result = cmd::cmd_assumptions_nn(np, std::cout); });

    auto* data = app.add_subcommand("data", "Dataset utilities");
    data->require_subcommand(1);
    auto* data_check = data->add_subcommand("check", "Validate a dataset file against its schema");
    data_check->add_option("--config", config_path, "Run configuration file")->required();
    data_check->callback([&] { result = cmd::cmd_data_check(load(), std::cout); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ExitCode::config_error);
    }
    return result;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const benign::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::numeric_error);
    }
}
