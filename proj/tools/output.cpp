#include "output.hpp"

#include "gaussline/config.hpp"

#include <fstream>
#include <iostream>
#include <stdexcept>

namespace gaussline::cli {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Output::Output(const Common& common, Json config) : stream_(&std::cout), config_(std::move(config))
{
    if (common.format != "csv" && common.format != "json") {
        throw std::invalid_argument("--format must be csv or json");
    }
    json_ = common.format == "json";
    config_["format"] = common.format;
    config_["threads"] = common.threads;
    config_["partitions"] = common.partitions;
    config_["budget"] = common.budget;
    config_["version"] = version();
    if (!common.out.empty()) {
        auto* f = new std::ofstream(common.out);
        if (!*f) {
            delete f;
            throw std::runtime_error("cannot open output file " + common.out);
        }
        owned_ = f;
        stream_ = f;
    }
}

Output::~Output()
{
    delete owned_;
}

std::ostream& Output::csv()
{
    if (!header_written_) {
        *stream_ << "# gaussline " << version() << "\n# config " << config_.dump() << "\n";
        header_written_ = true;
    }
    return *stream_;
}

void Output::json(Json result)
{
    Json doc;
    doc["config"] = config_;
    doc["result"] = std::move(result);
    *stream_ << doc.dump(2) << "\n";
}

} // namespace gaussline::cli
