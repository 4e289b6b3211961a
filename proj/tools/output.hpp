#pragma once

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <string>

namespace gaussline::cli {

using Json = nlohmann::ordered_json;

// Options shared by every subcommand; they become part of the run config.
struct Common {
    std::string format = "csv";
    std::string out;
    int threads = 0;
    int partitions = 64;
    std::uint64_t budget = 0; // 0: GAUSSLINE_BUDGET or the built-in default
};

std::string fmt17(double v);

// Writes to --out or stdout.  CSV output starts with '#' lines holding the
// run config and version; JSON output carries them under "config".
class Output {
public:
    Output(const Common& common, Json config);
    ~Output();

    std::ostream& csv();
    void json(Json result);
    bool is_json() const { return json_; }

private:
    std::ostream* stream_;
    std::ostream* owned_ = nullptr;
    Json config_;
    bool json_;
    bool header_written_ = false;
};

} // namespace gaussline::cli
