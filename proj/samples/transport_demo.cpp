// Builds the four-robot chain, checks both controllers, runs the two
// transports and prints the deformation and force maxima.

#include <cstdio>

#include "cohesive/cohesive.hpp"

int main() {
  using namespace cohesive;

  const StiffnessChain chain =
      calibrate_stiffness({{0, 10.0, 0.5}, {1, 10.0, 1.0}, {2, 10.0, 1.0}})
          .with_leader_stiffness(0, 0.05);
  const auto laplacian = build_pinned_laplacian(chain);
  std::printf("eigenvalues:");
  for (Eigen::Index i = 0; i < laplacian.eigenvalues().size(); ++i) {
    std::printf(" %.5f", laplacian.eigenvalues()(i));
  }
  std::printf("\ngamma bound %.3f, beta bound at alpha = 0.39: %.3f\n",
              baseline_gamma_bound(laplacian), lemma1_beta_bound(laplacian, 0.39, 0.03));

  for (const auto& scenario : {baseline_transport_scenario(), dsr_transport_scenario()}) {
    const auto stability = analyze(laplacian, scenario.controller);
    const auto summary = summarize(simulate(scenario));
    std::printf("%-15s sigma %.6f  D_bar %.3f cm  f_bar %.4f N  v_max %.3f cm/s\n",
                scenario.name.c_str(), stability.spectral_radius, summary.max_deformation,
                summary.max_force, summary.max_speed);
  }
  return 0;
}
