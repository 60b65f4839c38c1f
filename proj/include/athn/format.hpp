#pragma once

#include <string>

namespace athn {

// Six significant digits, '.' decimal separator; values of a million or more
// are written in full without a fraction so report columns never switch to
// exponent notation.
std::string format_number(double value);

// CSV field quoting for ids that contain separators or quotes.
std::string csv_field(const std::string& text);

}  // namespace athn
