#include "cascade_branch/format.hpp"

#include <cmath>

#include <fmt/format.h>

namespace cascade_branch {

std::string format_decimal(double value, int decimals)
{
    if (!std::isfinite(value))
        return fmt::format("{}", value);
    const double scale = std::pow(10.0, decimals);
    double rounded = std::round(value * scale) / scale;
    if (rounded == 0.0)
        rounded = 0.0; // no "-0.00"
    return fmt::format("{:.{}f}", rounded, decimals);
}

} // namespace cascade_branch
