#include "postsel/csv.hpp"

#include <charconv>
#include <cmath>

namespace postsel {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return {buf, res.ptr};
}

}  // namespace postsel
