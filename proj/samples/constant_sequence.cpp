// Solve the N=2 constant moment sequence S_n = [[1, c], [c, 1]], c = 3/sqrt(10),
// and print the recovered measure. Usage: constant_sequence [m]
#include <cstdlib>
#include <iostream>

#include "strongmoment.hpp"

using namespace strongmoment;

int main(int argc, char** argv) {
  const int m = argc > 1 ? std::atoi(argv[1]) : 1;
  const MomentSequence seq = example_sequence(m);

  const Problem p = analyze(seq);
  std::cout << "dim H = " << p.space.d << ", |C| = " << p.determinacy.norm_c
            << (p.determinacy.determinate ? " (determinate)\n" : " (indeterminate)\n");

  const TransformEvaluator ev(p, k_midpoint(p.interval), "mid");
  const SolutionMeasure mu = spectral_measure_direct(ev);
  for (const auto& a : mu.measure.atoms) std::cout << "atom t = " << a.t << "\nW =\n" << a.weight << "\n";

  // F(i) should equal S (1 + i) / 2 for a unit atom at 1
  std::cout << "F(i) =\n" << transform_formula(ev, cdouble(0, 1)) << "\n";

  const ResidualReport rr = roundtrip_verify(mu, seq);
  std::cout << "max residual on [-2m, 2m]: " << rr.max_residual << "\n";
  return rr.max_residual <= 1e-10 ? 0 : 1;
}
