// Rank-one construction with poles 1, 1/2, ..., 1/N: one protected point per
// gap, crowding toward 0 as the poles do.

#include <cstdio>
#include <vector>

#include "protect/protect.hpp"

int main() {
  constexpr int n = 20;
  std::vector<double> mu;
  for (int k = 1; k <= n; ++k) mu.push_back(1.0 / k);
  const auto c = protect::realize_via_poles<double>(mu);
  std::printf("%4s %14s %22s %10s\n", "k", "gap lower", "protected point", "residual");
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    const auto& p = c.points[k];
    std::printf("%4zu %14.8f %22.15f %10.1e\n", k + 1, p.gap.lower, p.lambda, p.residual);
  }
}
