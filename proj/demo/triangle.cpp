// Walks through the library on a three-agent triangle: exact consensus limit,
// a non-holonomic counterexample, inverse design and a simulated run.

#include <hologossip/design.hpp>
#include <hologossip/engine.hpp>
#include <hologossip/limit.hpp>

#include <iostream>

using namespace hologossip;

template <class T>
void print(const char* label, const std::vector<T>& v) {
  std::cout << label;
  for (const T& x : v) std::cout << ' ' << to_string(x);
  std::cout << '\n';
}

int main() {
  auto g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});

  WeightSet<Rational> ws(g, {{Rational(1, 5), Rational(3, 10)},
                             {Rational(1, 4), Rational(1, 2)},
                             {Rational(1, 5), Rational(3, 5)}});
  std::cout << "holonomic: " << std::boolalpha << is_holonomic(ws) << '\n';
  auto limit = consensus_limit(ws);
  print("limit:", limit.probability.entries);

  WeightSet<Rational> skewed(g, {{Rational(1, 2), Rational(1, 2)},
                                 {Rational(1, 2), Rational(1, 2)},
                                 {Rational(1, 4), Rational(1, 2)}});
  if (auto trees = nonholonomy_witness_trees(skewed)) {
    std::cout << "violated cycle: " << format_walk(trees->cycle) << '\n';
    print("  tree 1 vector:", trees->path_vector.entries);
    print("  tree 2 vector:", trees->closing_vector.entries);
  }

  // Weights for a chosen limit, then a simulated run that recovers it.
  auto target = make_probability_vector<Rational>({Rational(1, 4), Rational(1, 4), Rational(1, 2)});
  auto designed = design_for(target, g, BoxPoint<Rational>{{Rational(1, 2), Rational(1, 2), Rational(1, 2)}});
  print("designed limit:", consensus_limit(designed).probability.entries);

  RunReport report = run(convert_weights<double>(designed), random_schedule(g, 7, 10000));
  print("simulated limit:", report.limit);
  std::cout << "steps: " << report.steps << ", seminorm: " << report.final_seminorm << '\n';
}
