#pragma once

#include <cstddef>
#include <vector>

namespace profilernet::detail {

/// Table over a sorted list of variable indices, last variable fastest.
struct Factor {
  std::vector<std::size_t> vars;
  std::vector<std::size_t> cards;
  std::vector<double> values;

  bool contains(std::size_t v) const;
};

Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, std::size_t var);

}  // namespace profilernet::detail
