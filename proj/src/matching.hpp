#pragma once

// Bipartite matching helpers shared by the term relations and the orders.

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace spop::detail {

using Table = std::vector<std::vector<bool>>;

/// Perfect matching of rows onto columns of a square table through allowed
/// cells; row r goes to column result[r]. `fixed` pre-assigns one cell.
inline std::optional<std::vector<std::size_t>> match_rows(
    const Table& allowed, std::optional<std::pair<std::size_t, std::size_t>> fixed = std::nullopt) {
  const std::size_t n = allowed.size();
  std::vector<int> owner(n, -1);
  std::vector<int> assign(n, -1);
  if (fixed) {
    owner[fixed->second] = static_cast<int>(fixed->first);
    assign[fixed->first] = static_cast<int>(fixed->second);
  }
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t r, std::vector<bool>& seen) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!allowed[r][c] || seen[c]) continue;
      if (fixed && c == fixed->second) continue;
      seen[c] = true;
      if (owner[c] < 0 || augment(static_cast<std::size_t>(owner[c]), seen)) {
        owner[c] = static_cast<int>(r);
        assign[r] = static_cast<int>(c);
        return true;
      }
    }
    return false;
  };
  for (std::size_t r = 0; r < n; ++r) {
    if (fixed && r == fixed->first) continue;
    std::vector<bool> seen(n, false);
    if (!augment(r, seen)) return std::nullopt;
  }
  std::vector<std::size_t> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = static_cast<std::size_t>(assign[r]);
  return out;
}

/// Product extension modulo permutation: every row is matched through `weak`
/// and, when `strict_needed`, at least one matched cell is in `strict`.
inline std::optional<std::vector<std::size_t>> product_match(const Table& weak, const Table& strict,
                                                             bool strict_needed) {
  if (!strict_needed) return match_rows(weak);
  for (std::size_t i = 0; i < strict.size(); ++i)
    for (std::size_t j = 0; j < strict.size(); ++j)
      if (strict[i][j] && weak[i][j])
        if (auto m = match_rows(weak, std::make_pair(i, j))) return m;
  return std::nullopt;
}

}  // namespace spop::detail
