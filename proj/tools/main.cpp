#include "commands.hpp"

#include "gaussline/config.hpp"
#include "gaussline/errors.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    using namespace gaussline;
    CLI::App app{"Continued-fraction measures: dimensions, Fourier decay, large deviations and equidistribution"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", version());
    app.set_config("--config", "", "Read options from a TOML/INI file");

    cli::Common common;
    app.add_option("--format", common.format, "Output format: csv or json")->capture_default_str();
    app.add_option("--out", common.out, "Write output to this file instead of stdout");
    app.add_option("--threads", common.threads, "OpenMP threads (0: runtime default)");
    app.add_option("--partitions", common.partitions, "Work partitions of parallel reductions")
        ->capture_default_str();
    app.add_option("--budget", common.budget, "Enumeration budget (overrides GAUSSLINE_BUDGET)");

    cli::add_continuants(app, common);
    cli::add_dimension(app, common);
    cli::add_fourier_scan(app, common);
    cli::add_fit(app, common);
    cli::add_qmark(app, common);
    cli::add_box(app, common);
    cli::add_ldcheck(app, common);
    cli::add_equidist(app, common);
    cli::add_stationary(app, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return 2;
    } catch (const cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const BracketError& e) {
        std::cerr << "bracket error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
