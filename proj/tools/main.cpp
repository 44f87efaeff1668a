#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "darcywave/cli.hpp"
#include "darcywave_testing/selftest.hpp"

int main(int argc, char** argv) {
    using namespace darcywave;
    CLI::App app{"darcywave: traveling waves in free-boundary Darcy flow"};
    app.require_subcommand(1);

    std::string config, out;
    bool allow_uncertified = false;
    auto* cont = app.add_subcommand("continue", "trace a solution branch from (0, 0)");
    cont->add_option("--config", config, "run configuration (JSON)")->required();
    cont->add_option("--out", out, "output directory (overrides output_dir)");
    cont->add_flag("--allow-uncertified", allow_uncertified, "run even if the ellipticity conditions are not certified");

    std::string dir;
    long point = 0;
    cli::VerifyOptions vopt;
    auto* ver = app.add_subcommand("verify", "reconstruct a branch point and check the traveling system");
    ver->add_option("dir", dir, "branch directory")->required();
    ver->add_option("--point", point, "branch point index")->required();
    ver->add_flag("--refine", vopt.refine, "re-solve at 2N, 2 M_z and print the drift");
    ver->add_option("--tol", vopt.tolerance, "residual tolerance");
    ver->add_option("--export", vopt.export_path, "write the reconstructed fields to this file");

    std::string suite;
    bool mutate = false;
    auto* self = app.add_subcommand("selftest", "run the operator identity and oracle suites");
    self->add_option("--suite", suite, "run a single suite");
    self->add_flag("--mutate-sdown", mutate, "flip the sign of the S_down symbol (mutation check)");

    std::string mdir;
    auto* mon = app.add_subcommand("monitors", "print the monitor table of a stored branch");
    mon->add_option("dir", mdir, "branch directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::usage;
    }

    if (*cont) return cli::cmd_continue(config, out, allow_uncertified, std::cout, std::cerr);
    if (*ver) return cli::cmd_verify(dir, point, vopt, std::cout, std::cerr);
    if (*mon) return cli::cmd_monitors(mdir, std::cout, std::cerr);
    if (*self) {
        testing_hooks::flip_sdown_sign() = mutate;
        return testing::run_selftest(suite, std::cout);
    }
    return cli::usage;
}
