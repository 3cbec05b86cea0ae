// Every decaying solution has a late-time expansion u(t) = sum_n q_n(t) e^{-nt}
// with polynomial-in-t coefficient fields.  This program integrates small
// random data, recovers the normal-form state (xi_n) from the trajectory,
// rebuilds the solution from the first few levels, and reports how fast the
// reconstruction closes in on the integrated flow.

#include <cstdio>

#include "torusnf/initial_data.hpp"
#include "torusnf/normal_form.hpp"
#include "torusnf/solver.hpp"

using namespace torusnf;

int main() {
  const int order = 4;
  SpectralField u0 = random_field(3, 10, 2024, 0.05);
  Trajectory traj = evolve(u0, 1e-3, 12.0, 50);

  ExtractionResult ext = extract_normalization(traj, order);
  std::printf("recovered shells (h-norm per level):\n");
  for (const auto& [shell, comp] : ext.xi.comp)
    std::printf("  xi_%d  %.6e\n", shell, h_norm(comp));

  ExpansionEngine eng(ext.xi);
  std::printf("\nt       ||u(t) - sum_{n<=%d} q_n(t)e^{-nt}||_H\n", order);
  for (size_t i = 0; i < traj.times.size(); ++i) {
    double t = traj.times[i];
    if (t < 2.0 || std::fmod(t, 2.0) > 1e-9) continue;
    SpectralField rec = eng.eval_sum(t, order);
    double err = h_norm(lin_comb(1.0, traj.states[i], -1.0, rec));
    std::printf("%5.1f   %.3e\n", t, err);
  }

  std::printf("\neach extra level buys one more e^{-t} of agreement;\n");
  std::printf("the residual above decays like e^{-%d t} until rounding wins.\n",
              order + 1);
  return 0;
}
