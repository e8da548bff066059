#pragma once

#include <string>

namespace profilernet {

/// Shortest decimal text that reads back as exactly `x`.
std::string format_shortest(double x);

/// `x` in general notation with `significant` digits (17 round-trips).
std::string format_general(double x, int significant);

}  // namespace profilernet
