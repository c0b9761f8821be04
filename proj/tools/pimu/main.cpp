#include <CLI11.hpp>

#include "pimu/commands.hpp"
#include "pimu/error.hpp"
#include "pimu/log.hpp"

namespace {

// 0 success, 2 validation error, 3 data error, 4 model mismatch
constexpr int exit_validation = 2;
constexpr int exit_data = 3;
constexpr int exit_model = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-inertial diver swimming-state pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pimu 0.1.0");

    pimu_cli::register_simulate(app);
    pimu_cli::register_train(app);
    pimu_cli::register_stream(app);
    pimu_cli::register_eval(app);
    pimu_cli::register_features(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_validation;
    } catch (const pimu::corrupt_file_error& e) {
        pimu_cli::logging::error(e.what());
        return exit_model;
    } catch (const pimu::version_mismatch_error& e) {
        pimu_cli::logging::error(e.what());
        return exit_model;
    } catch (const pimu::layout_mismatch_error& e) {
        pimu_cli::logging::error(e.what());
        return exit_model;
    } catch (const pimu::shape_mismatch_error& e) {
        pimu_cli::logging::error(e.what());
        return exit_model;
    } catch (const pimu::parse_error& e) {
        pimu_cli::logging::error(e.what());
        return exit_data;
    } catch (const pimu::non_monotone_timestamps_error& e) {
        pimu_cli::logging::error(e.what());
        return exit_data;
    } catch (const pimu::degenerate_dataset_error& e) {
        pimu_cli::logging::error(e.what());
        return exit_data;
    } catch (const pimu::io_error& e) {
        pimu_cli::logging::error(e.what());
        return exit_data;
    } catch (const pimu::error& e) {
        // remaining library errors are configuration/validation problems
        pimu_cli::logging::error(e.what());
        return exit_validation;
    } catch (const std::exception& e) {
        pimu_cli::logging::error(std::string("unexpected: ") + e.what());
        return 1;
    }
    return 0;
}
