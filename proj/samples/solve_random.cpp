// Solves a random instance with MIP pricing and prints the barycenter.
//
//   example_solve_random [n] [p] [seed]

#include <cstdlib>
#include <iostream>

#include "wbary/wbary.hpp"

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 4;
  const std::size_t p = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 3;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 1;

  const auto inst = wbary::random_instance(n, p, seed);
  wbary::SolverConfig cfg;
  cfg.strategy = wbary::BranchingStrategy::most_repeated;
  const auto result = wbary::run(inst, cfg);

  std::cout << "cost " << result.report.final_cost << " after " << result.report.iterations << " iterations\n";
  for (const auto& e : result.barycenter.support) {
    std::cout << "  (";
    for (std::size_t c = 0; c < e.point.size(); ++c) std::cout << (c ? ", " : "") << e.point[c];
    std::cout << ")  mass " << e.mass << "  from " << wbary::to_string(e.combination) << '\n';
  }
}
