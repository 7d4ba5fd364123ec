// Builds a pair (A, B) with a prescribed protected set, recovers the set with
// protected_set, and shows how solve_t reaches every other point.

#include <cstdio>
#include <vector>

#include "protect/protect.hpp"

int main() {
  const std::vector<double> points{-2.0, 0.5, 3.0};
  const auto pair = protect::realize<double>(points);
  const auto report = protect::protected_set(pair.a, pair.b);

  std::printf("prescribed:");
  for (double p : points) std::printf(" %g", p);
  std::printf("\nrecovered: ");
  for (const auto& q : report.protected_points) std::printf(" %.15g (residual %.1e)", q.lambda, q.residual);
  std::printf("\n\n%10s %14s %18s\n", "lambda", "t*", "dist to spectrum");
  for (double lambda : {-3.0, -1.0, 0.0, 1.0, 2.9, 10.0}) {
    const double t = protect::solve_t(pair, lambda);
    const auto d = protect::eigh(pair.a + t * pair.b);
    std::printf("%10g %14.6g %18.3e\n", lambda, t, protect::dist_to_spectrum(d, lambda));
  }
}
