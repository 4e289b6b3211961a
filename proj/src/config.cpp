#include "gaussline/config.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#ifndef GAUSSLINE_VERSION
#define GAUSSLINE_VERSION "0.0.0"
#endif

namespace gaussline {

Limits Limits::from_environment()
{
    Limits limits;
    if (const char* env = std::getenv("GAUSSLINE_BUDGET")) {
        std::uint64_t value = 0;
        const char* end = env + std::strlen(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec == std::errc() && ptr == end && value > 0) {
            limits.budget = value;
        }
    }
    return limits;
}

const char* version()
{
    return GAUSSLINE_VERSION;
}

} // namespace gaussline
