#pragma once

#include <string>

namespace postsel {

/// %.17g rendering with a "." decimal point regardless of locale.
std::string format_number(double value);

}  // namespace postsel
