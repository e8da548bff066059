#pragma once

#include "profilernet/network.hpp"

namespace profilernet::fixtures {

/// Three-node fork X1 -> X2, X1 -> X3. X1 has prior [0.2, 0.5, 0.3]; X2's
/// rows for X1 = x1_1 and x1_2 are [0.2, 0.8] and [0.9, 0.1]. The remaining
/// rows are illustrative. X1 is the input, X2 and X3 are outputs.
Network three_node_example();

/// Synthetic homicide-profiling network: 4 offender (output) variables and
/// 11 crime-scene (input) variables, all binary. The parameters are invented
/// for demonstration and testing and carry no empirical meaning.
Network profiling_example();

}  // namespace profilernet::fixtures
