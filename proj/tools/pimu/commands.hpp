#pragma once

#include <CLI11.hpp>

namespace pimu_cli {

void register_simulate(CLI::App& app);
void register_train(CLI::App& app);
void register_stream(CLI::App& app);
void register_eval(CLI::App& app);
void register_features(CLI::App& app);

}  // namespace pimu_cli
