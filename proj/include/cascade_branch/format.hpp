#pragma once

#include <string>

namespace cascade_branch {

/// Fixed-point text with ties rounded away from zero (4.28125 -> "4.2813"),
/// '.' as decimal separator regardless of locale.
std::string format_decimal(double value, int decimals);

} // namespace cascade_branch
