#pragma once

#include "bep/field.hpp"
#include "bep/norms.hpp"
#include "bep/series.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bep {

/// P(rho) = rho^gamma / gamma, so P'(1) = 1 and h(n) = P'(1+n)/(1+n) - 1 = (1+n)^{gamma-2} - 1.
struct PressureLaw {
  double gamma = 2.0;

  double pressure(double rho) const;
  double sound_speed_squared(double rho) const;  ///< P'(rho)
  double enthalpy_defect(double n) const;        ///< h(n)
};

/// Component order of the spectral state: n1, u1 (3), n2, u2 (3).
inline constexpr int kStateRank = 8;

/// Perturbations (n_i = rho_i - 1, u_i) at one time. phi is derived.
struct FluidState {
  RealField n1, u1, n2, u2;
  double time = 0.0;

  explicit FluidState(const Grid& grid);
};

/// The same unknowns as one rank-8 spectral field.
struct SpectralState {
  SpectralField q;
  double time = 0.0;

  explicit SpectralState(const Grid& grid) : q(grid, kStateRank) {}
  SpectralState(SpectralField fields, double t);

  const Grid& grid() const { return q.grid(); }
  SpectralField density(int species) const;   ///< species 0 or 1
  SpectralField velocity(int species) const;
};

SpectralState to_spectral(const FluidState& s);
FluidState to_physical(const SpectralState& s);

/// Extra source added to the right-hand side (manufactured solutions);
/// returns a rank-8 spectral field.
using Forcing = std::function<SpectralField(double t, const Grid& grid)>;

struct SolverConfig {
  Grid grid{32, 100.0};
  PressureLaw pressure;
  double dt = 0.0;  ///< 0 selects the CFL step, recomputed every 16 steps
  double t_end = 1.0;
  double cfl_number = 0.3;
  double output_cadence = 1.0;
  std::vector<int> diagnostic_orders{0, 1, 2};
  Forcing forcing;
  /// Only for cross-checks: drop the h(n) grad n term entirely.
  bool include_enthalpy = true;
};

/// Largest dt allowed by cfl * min(dx / (1 + max|u| + max sqrt P'(1+n)), 0.5).
double cfl_limit(const SpectralState& s, const SolverConfig& cfg);

/// Semi-discrete right-hand side (n1', u1', n2', u2'). Products are formed in
/// physical space from 2/3-dealiased factors and the product transforms are
/// dealiased again. Throws VacuumError when 1 + n_i < 0.1 somewhere.
SpectralField rhs(const SpectralState& s, const SolverConfig& cfg);

/// Physical-space form of rhs.
FluidState rhs(const FluidState& s, const SolverConfig& cfg);

/// One classical RK4 step of size cfg.dt (must be > 0 and within cfl_limit,
/// else CflError). Throws InstabilityError if a stage turns non-finite.
SpectralState step(const SpectralState& s, const SolverConfig& cfg);

/// RK4 step of size dt without the CFL check.
SpectralState advance(const SpectralState& s, const SolverConfig& cfg, double dt);

/// Named quantities of a state for norm evaluation: n1, n2, u1, u2,
/// grad_phi, n_sum, n_diff, u_sum, u_diff, density (n1, n2), velocity (u1, u2),
/// total (n1, u1, n2, u2, grad phi).
SpectralField select_quantity(const SpectralState& s, const std::string& name);
const std::vector<std::string>& quantity_names();

/// grad phi from Lap phi = n1 - n2.
SpectralField potential_gradient(const SpectralState& s);

struct EnergyDiagnostics {
  struct Order {
    int k = 0;
    double energy = 0.0;        ///< E_k = 1/2 ||grad^k (n1, u1, n2, u2, grad phi)||^2
    double dissipation = 0.0;   ///< D_k = ||grad^k (u1, u2)||^2
    double dissipation_next = 0.0;  ///< D_{k+1}
    double cross = 0.0;         ///< int grad^k u_i . grad grad^k n_i
    double reference = 0.0;     ///< R_k
    double energy_rate = 0.0;   ///< dE_k/dt = <state, rhs> in the grad^k inner product
    double cross_rate = 0.0;    ///< d cross_k / dt
    double gradient_norm = 0.0; ///< ||grad^{k+1} (n1, n2, grad phi)||^2
    double disparity = 0.0;     ///< ||grad^k (n1 - n2)||
    double laplacian_phi = 0.0; ///< ||grad^k Lap phi||
    double field_gradient = 0.0;  ///< ||grad^{k+1} grad phi||
    /// |int grad^k (n1 - n2) . grad^k Lap phi - ||grad^k (n1 - n2)||^2| relative
    double identity_defect = 0.0;
  };
  double time = 0.0;
  double delta = 0.0;  ///< ||(n, u, grad phi)||_{H^3}
  std::vector<Order> orders;
};

EnergyDiagnostics energy_diagnostics(const SpectralState& s, const SolverConfig& cfg);

struct EnergyVerdict {
  int k = 0;
  double max_ratio = 0.0;         ///< max |dE_k/dt + D_k| / R_k
  double max_ratio_over_delta = 0.0;
  bool lyapunov_pass = false;     ///< ratio_k <= K delta at every sample
  double cross_c = 0.5;           ///< c in the dissipation-recovery check
  double cross_C = 0.0;           ///< measured C = max (cross' + c G) / (D_k + D_{k+1})
  bool cross_pass = false;        ///< C <= 1 + K delta_max
  double max_identity_defect = 0.0;
  double max_poisson_mismatch = 0.0;  ///< relative, over the three Poisson norms
  bool identity_pass = false;     ///< both <= 1e-10
};

/// The harness constant K: 3x the largest ratio/delta (0.01233, k = 3) of the
/// reference sweep, frozen. Reference sweep: gaussian_bump on Grid(32, 50),
/// width 5, offset 2, match balance, amplitudes A in {1, 2, 4} x 1e-3 with
/// velocities (A, -A/2), t in [0, 10] every 0.5, orders 0..3.
inline constexpr double kEnergyHarnessK = 0.037;

/// Needs at least 3 samples.
std::vector<EnergyVerdict> energy_inequality_report(const std::vector<EnergyDiagnostics>& series,
                                                    double K = kEnergyHarnessK);

enum class RunStatus { completed, failed };

struct RunResult {
  RunStatus status = RunStatus::completed;
  std::string message;
  std::vector<NormSeries> norms;
  std::vector<EnergyDiagnostics> diagnostics;
  SpectralState final_state;
  long steps = 0;

  explicit RunResult(const Grid& grid) : final_state(grid) {}
};

/// Integrates to cfg.t_end, landing on every multiple of output_cadence.
/// Runtime failures stop the run; results up to the failure are returned with
/// status failed.
RunResult run(const SpectralState& initial, const SolverConfig& cfg, const std::vector<NormSpec>& specs);

struct InitialParams {
  enum class Family { gaussian_bump, spectral_powerlaw };
  enum class Balance { strict, match, zero_mean };
  Family family = Family::gaussian_bump;
  Balance balance = Balance::strict;
  double amplitude1 = 1e-3;  ///< density amplitude, species 1
  double amplitude2 = 1e-3;
  double velocity1 = 0.0;    ///< velocity amplitude (every component), species 1
  double velocity2 = 0.0;
  double width = 5.0;        ///< gaussian_bump
  double offset = 0.0;       ///< species 2 center shift along x1 (gaussian_bump)
  double sigma = 0.0;        ///< spectral_powerlaw magnitude |xi|^sigma
  double cutoff = 1.0;
  std::uint64_t seed = 1;
};

/// gaussian_bump: n_i = A_i exp(-|x - x_i|^2 / w^2) around the box center,
/// u_i likewise with amplitude V_i. spectral_powerlaw: random phases with
/// magnitude A (2 pi)^{3/2} V^{-1/2} |xi|^sigma eta(|xi| / cutoff), one named
/// random stream per component. Nyquist modes are zeroed. Unequal density
/// means (beyond 1e-6 relative) throw ChargeImbalanceError unless balance is
/// match (shift n2) or
/// zero_mean (remove every mean).
SpectralState make_initial(const InitialParams& params, const Grid& grid);

/// splitmix64 of (root ^ FNV-1a(name)).
std::uint64_t stream_seed(std::uint64_t root, const std::string& name);

}  // namespace bep
