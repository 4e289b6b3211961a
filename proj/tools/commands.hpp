#pragma once

#include "output.hpp"

#include <CLI11.hpp>

namespace gaussline::cli {

void add_continuants(CLI::App& app, Common& common);
void add_dimension(CLI::App& app, Common& common);
void add_fourier_scan(CLI::App& app, Common& common);
void add_fit(CLI::App& app, Common& common);
void add_qmark(CLI::App& app, Common& common);
void add_box(CLI::App& app, Common& common);
void add_ldcheck(CLI::App& app, Common& common);
void add_equidist(CLI::App& app, Common& common);
void add_stationary(CLI::App& app, Common& common);

// Thrown for bad input detected after option parsing (exit code 2).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace gaussline::cli
