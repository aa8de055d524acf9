#ifndef L2SRL_UTIL_HPP_
#define L2SRL_UTIL_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace l2srl {

std::vector<std::string_view> split(std::string_view text, char sep);
std::optional<int> parse_int(std::string_view text);
std::optional<double> parse_double(std::string_view text);
bool is_valid_utf8(std::string_view text);

// Shortest decimal that reads back to the same double.
std::string format_shortest(double value);
// Fixed-point rendering, half away from zero.
std::string format_fixed(double value, int decimals);

// Uniform integer in [0, bound) built only on the engine's raw output, so the
// sequence is identical across standard library implementations.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void shuffle_in_place(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace l2srl

#endif  // L2SRL_UTIL_HPP_
