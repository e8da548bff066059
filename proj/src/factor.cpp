#include "factor.hpp"

#include <algorithm>
#include <iterator>

namespace profilernet::detail {

namespace {

// Stride of each of `vars` inside `f`, 0 where f does not mention the var.
std::vector<std::size_t> strides_in(const Factor& f,
                                    const std::vector<std::size_t>& vars) {
  std::vector<std::size_t> own(f.vars.size());
  std::size_t stride = 1;
  for (std::size_t k = f.vars.size(); k-- > 0;) {
    own[k] = stride;
    stride *= f.cards[k];
  }
  std::vector<std::size_t> out(vars.size(), 0);
  for (std::size_t j = 0; j < vars.size(); ++j) {
    auto it = std::lower_bound(f.vars.begin(), f.vars.end(), vars[j]);
    if (it != f.vars.end() && *it == vars[j]) out[j] = own[it - f.vars.begin()];
  }
  return out;
}

std::size_t table_size(const std::vector<std::size_t>& cards) {
  std::size_t n = 1;
  for (auto c : cards) n *= c;
  return n;
}

}  // namespace

bool Factor::contains(std::size_t v) const {
  return std::binary_search(vars.begin(), vars.end(), v);
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  for (auto v : out.vars) {
    auto it = std::lower_bound(a.vars.begin(), a.vars.end(), v);
    if (it != a.vars.end() && *it == v) {
      out.cards.push_back(a.cards[it - a.vars.begin()]);
    } else {
      out.cards.push_back(
          b.cards[std::lower_bound(b.vars.begin(), b.vars.end(), v) -
                  b.vars.begin()]);
    }
  }
  const auto sa = strides_in(a, out.vars);
  const auto sb = strides_in(b, out.vars);
  const std::size_t n = table_size(out.cards);
  out.values.resize(n);

  std::vector<std::size_t> counter(out.vars.size(), 0);
  std::size_t ia = 0;
  std::size_t ib = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = a.values[ia] * b.values[ib];
    for (std::size_t j = out.vars.size(); j-- > 0;) {
      ++counter[j];
      ia += sa[j];
      ib += sb[j];
      if (counter[j] < out.cards[j]) break;
      ia -= out.cards[j] * sa[j];
      ib -= out.cards[j] * sb[j];
      counter[j] = 0;
    }
  }
  return out;
}

Factor sum_out(const Factor& f, std::size_t var) {
  Factor out;
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    if (f.vars[k] == var) continue;
    out.vars.push_back(f.vars[k]);
    out.cards.push_back(f.cards[k]);
  }
  out.values.assign(table_size(out.cards), 0.0);
  const auto so = strides_in(out, f.vars);

  std::vector<std::size_t> counter(f.vars.size(), 0);
  std::size_t io = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    out.values[io] += f.values[i];
    for (std::size_t j = f.vars.size(); j-- > 0;) {
      ++counter[j];
      io += so[j];
      if (counter[j] < f.cards[j]) break;
      io -= f.cards[j] * so[j];
      counter[j] = 0;
    }
  }
  return out;
}

}  // namespace profilernet::detail
