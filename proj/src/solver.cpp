#include "bep/solver.hpp"

#include "bep/besov.hpp"
#include "bep/errors.hpp"
#include "bep/fft.hpp"
#include "bep/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace bep {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kStrictBalanceTolerance = 1e-6;

// Columns of the rank-8 state.
constexpr int density_col(int species) { return 4 * species; }
constexpr int velocity_col(int species, int c) { return 4 * species + 1 + c; }

SpectralField columns(const SpectralField& f, int first, int count) {
  return SpectralField(f.grid(), f.coeffs().middleCols(first, count));
}

void check_finite(const SpectralField& f, const char* where) {
  if (!f.coeffs().allFinite()) throw InstabilityError(std::string("non-finite state after ") + where);
}

// sum_c sum_modes weight * sym * Re(conj(a_c) b_c)
double weighted_inner(const SpectralField& a, const SpectralField& b, const Eigen::ArrayXd& sym) {
  const auto geo = geometry(a.grid());
  const Eigen::ArrayXd w = geo->weight * sym;
  double sum = 0.0;
  for (int c = 0; c < a.rank(); ++c) sum += (w * (a.component(c).conjugate() * b.component(c)).real()).sum();
  return sum;
}

}  // namespace

double PressureLaw::pressure(double rho) const { return std::pow(rho, gamma) / gamma; }

double PressureLaw::sound_speed_squared(double rho) const { return std::pow(rho, gamma - 1.0); }

double PressureLaw::enthalpy_defect(double n) const { return std::pow(1.0 + n, gamma - 2.0) - 1.0; }

FluidState::FluidState(const Grid& grid) : n1(grid, 1), u1(grid, 3), n2(grid, 1), u2(grid, 3) {}

SpectralState::SpectralState(SpectralField fields, double t) : q(std::move(fields)), time(t) {
  if (q.rank() != kStateRank) throw PreconditionError("SpectralState: rank-8 field required");
}

SpectralField SpectralState::density(int species) const { return columns(q, density_col(species), 1); }

SpectralField SpectralState::velocity(int species) const { return columns(q, velocity_col(species, 0), 3); }

SpectralState to_spectral(const FluidState& s) {
  return SpectralState(to_spectral(stack({&s.n1, &s.u1, &s.n2, &s.u2})), s.time);
}

FluidState to_physical(const SpectralState& s) {
  const RealField all = to_physical(s.q);
  FluidState out(s.grid());
  out.n1.values() = all.values().col(0);
  out.u1.values() = all.values().middleCols(1, 3);
  out.n2.values() = all.values().col(4);
  out.u2.values() = all.values().middleCols(5, 3);
  out.time = s.time;
  return out;
}

SpectralField potential_gradient(const SpectralState& s) {
  const SpectralField n1 = s.density(0), n2 = s.density(1);
  return gradient(poisson_solve(n1 - n2, l2_norm(n1) + l2_norm(n2)));
}

double cfl_limit(const SpectralState& s, const SolverConfig& cfg) {
  const FluidState f = to_physical(s);
  double max_u = 0.0, max_c = 0.0;
  for (const auto* pair : {&f.u1, &f.u2}) max_u = std::max(max_u, pair->values().square().rowwise().sum().sqrt().maxCoeff());
  for (const auto* n : {&f.n1, &f.n2}) {
    const double rho_max = 1.0 + n->values().maxCoeff();
    const double rho_min = 1.0 + n->values().minCoeff();
    for (double rho : {rho_max, rho_min}) {
      if (rho > 0.0) max_c = std::max(max_c, std::sqrt(cfg.pressure.sound_speed_squared(rho)));
    }
  }
  return cfg.cfl_number * std::min(cfg.grid.spacing() / (1.0 + max_u + max_c), 0.5);
}

SpectralField rhs(const SpectralState& s, const SolverConfig& cfg) {
  const Grid& grid = s.grid();
  const auto geo = geometry(grid);
  SpectralField out(grid, kStateRank);

  const SpectralField n1 = s.density(0), n2 = s.density(1);
  const SpectralField phi = poisson_solve(n1 - n2, l2_norm(n1) + l2_norm(n2));

  for (int i = 0; i < 2; ++i) {
    const double sign = i == 0 ? 1.0 : -1.0;
    const auto n = s.q.component(density_col(i));
    auto dn = out.component(density_col(i));
    for (int c = 0; c < 3; ++c) {
      const auto u = s.q.component(velocity_col(i, c));
      dn -= kI * (geo->xi_diff[c] * u);
      out.component(velocity_col(i, c)) =
          -u - kI * (geo->xi_diff[c] * n) + sign * kI * (geo->xi_diff[c] * phi.component(0));
    }
  }

  const SpectralField qd = dealias(s.q);
  for (int i = 0; i < 2; ++i) {
    // Physical factors: n, u (3), grad n (3), grad u (9, row-major c * 3 + d = d_d u_c).
    SpectralField factors(grid, Eigen::ArrayXXcd(grid.num_modes(), 16));
    const auto n = qd.component(density_col(i));
    factors.component(0) = n;
    for (int c = 0; c < 3; ++c) {
      const auto u = qd.component(velocity_col(i, c));
      factors.component(1 + c) = u;
      factors.component(4 + c) = kI * (geo->xi_diff[c] * n);
      for (int d = 0; d < 3; ++d) factors.component(7 + 3 * c + d) = kI * (geo->xi_diff[d] * u);
    }
    const RealField p = to_physical(factors);
    const auto& v = p.values();
    if ((1.0 + v.col(0)).minCoeff() < 0.1) {
      throw VacuumError("density guard 1 + n >= 0.1 violated for species " + std::to_string(i + 1));
    }
    RealField nonlinear(grid, Eigen::ArrayXXd(grid.num_points(), 4));
    auto& nl = nonlinear.values();
    const Eigen::ArrayXd div = v.col(7) + v.col(11) + v.col(15);
    nl.col(0) = -(v.col(1) * v.col(4) + v.col(2) * v.col(5) + v.col(3) * v.col(6) + v.col(0) * div);
    for (int c = 0; c < 3; ++c) {
      Eigen::ArrayXd adv = v.col(1) * v.col(7 + 3 * c) + v.col(2) * v.col(8 + 3 * c) + v.col(3) * v.col(9 + 3 * c);
      nl.col(1 + c) = -adv;
    }
    if (cfg.include_enthalpy) {
      const double g = cfg.pressure.gamma;
      const Eigen::ArrayXd h = v.col(0).unaryExpr([g](double x) { return std::pow(1.0 + x, g - 2.0) - 1.0; });
      for (int c = 0; c < 3; ++c) nl.col(1 + c) -= h * v.col(4 + c);
    }
    SpectralField nls = to_spectral(nonlinear);
    dealias_in_place(nls);
    out.component(density_col(i)) += nls.component(0);
    for (int c = 0; c < 3; ++c) out.component(velocity_col(i, c)) += nls.component(1 + c);
  }

  if (cfg.forcing) {
    const SpectralField f = cfg.forcing(s.time, grid);
    if (f.grid() != grid || f.rank() != kStateRank) throw PreconditionError("forcing: rank-8 field on the state grid required");
    out += f;
  }
  return out;
}

FluidState rhs(const FluidState& s, const SolverConfig& cfg) {
  const SpectralState spec = to_spectral(s);
  return to_physical(SpectralState(rhs(spec, cfg), s.time));
}

SpectralState advance(const SpectralState& s, const SolverConfig& cfg, double dt) {
  auto stage = [&](const SpectralField& q, double t, const char* name) {
    try {
      SpectralField k = rhs(SpectralState(q, t), cfg);
      check_finite(k, name);
      return k;
    } catch (const NonFiniteError& e) {
      throw InstabilityError(std::string("non-finite values in ") + name + ": " + e.what());
    }
  };
  const double t = s.time;
  const SpectralField k1 = stage(s.q, t, "stage 1");
  const SpectralField k2 = stage(s.q + (0.5 * dt) * k1, t + 0.5 * dt, "stage 2");
  const SpectralField k3 = stage(s.q + (0.5 * dt) * k2, t + 0.5 * dt, "stage 3");
  const SpectralField k4 = stage(s.q + dt * k3, t + dt, "stage 4");
  SpectralState out(s.q, t + dt);
  out.q.coeffs() += (dt / 6.0) * (k1.coeffs() + 2.0 * k2.coeffs() + 2.0 * k3.coeffs() + k4.coeffs());
  check_finite(out.q, "the update");
  return out;
}

SpectralState step(const SpectralState& s, const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw PreconditionError("step: cfg.dt must be positive");
  const double limit = cfl_limit(s, cfg);
  if (cfg.dt > limit) {
    throw CflError("dt " + std::to_string(cfg.dt) + " exceeds the CFL limit " + std::to_string(limit));
  }
  return advance(s, cfg, cfg.dt);
}

const std::vector<std::string>& quantity_names() {
  static const std::vector<std::string> names{"n1",     "n2",     "u1",      "u2",       "grad_phi", "n_sum",
                                              "n_diff", "u_sum",  "u_diff",  "density",  "velocity", "total"};
  return names;
}

SpectralField select_quantity(const SpectralState& s, const std::string& name) {
  if (name == "n1") return s.density(0);
  if (name == "n2") return s.density(1);
  if (name == "u1") return s.velocity(0);
  if (name == "u2") return s.velocity(1);
  if (name == "grad_phi") return potential_gradient(s);
  if (name == "n_sum") return s.density(0) + s.density(1);
  if (name == "n_diff") return s.density(0) - s.density(1);
  if (name == "u_sum") return s.velocity(0) + s.velocity(1);
  if (name == "u_diff") return s.velocity(0) - s.velocity(1);
  if (name == "density") {
    const auto a = s.density(0), b = s.density(1);
    return stack({&a, &b});
  }
  if (name == "velocity") {
    const auto a = s.velocity(0), b = s.velocity(1);
    return stack({&a, &b});
  }
  if (name == "total") {
    const auto g = potential_gradient(s);
    return stack({&s.q, &g});
  }
  throw PreconditionError("unknown quantity '" + name + "'");
}

EnergyDiagnostics energy_diagnostics(const SpectralState& s, const SolverConfig& cfg) {
  const Grid& grid = s.grid();
  const auto geo = geometry(grid);
  const SpectralField dq = rhs(s, cfg);
  const SpectralField n1 = s.density(0), n2 = s.density(1);
  const double scale = l2_norm(n1) + l2_norm(n2);
  const SpectralField diff = n1 - n2;
  const SpectralField phi = poisson_solve(diff, scale);
  const SpectralField gphi = gradient(phi);
  const SpectralField dn1 = columns(dq, 0, 1), dn2 = columns(dq, 4, 1);
  const SpectralField gphi_t = gradient(poisson_solve(dn1 - dn2, l2_norm(dn1) + l2_norm(dn2)));
  const SpectralField lap_phi = divergence(gphi);
  const SpectralField u1 = columns(s.q, 1, 3), u2 = columns(s.q, 5, 3);
  const SpectralField u = stack({&u1, &u2});
  const SpectralField dens = stack({&n1, &n2});

  EnergyDiagnostics diag;
  diag.time = s.time;
  const SpectralField all = stack({&s.q, &gphi});
  diag.delta = sobolev_norm(all, 3);

  for (int k : cfg.diagnostic_orders) {
    if (k < 0 || k > 3) throw PreconditionError("energy_diagnostics: orders must be in [0, 3]");
    const Eigen::ArrayXd sym = k == 0 ? Eigen::ArrayXd::Ones(grid.num_modes()) : Eigen::ArrayXd(geo->xi_diff_squared.pow(k));
    const Eigen::ArrayXd sym1 = geo->xi_diff_squared.pow(k + 1);
    EnergyDiagnostics::Order o;
    o.k = k;
    o.energy = 0.5 * (weighted_inner(s.q, s.q, sym) + weighted_inner(gphi, gphi, sym));
    o.dissipation = weighted_inner(u, u, sym);
    o.dissipation_next = weighted_inner(u, u, sym1);
    o.gradient_norm = weighted_inner(dens, dens, sym1) + weighted_inner(gphi, gphi, sym1);
    o.reference = o.gradient_norm + o.dissipation;
    o.energy_rate = weighted_inner(s.q, dq, sym) + weighted_inner(gphi, gphi_t, sym);
    double cross = 0.0, cross_rate = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int c = 0; c < 3; ++c) {
        const Eigen::ArrayXcd grad_n = kI * (geo->xi_diff[c] * s.q.component(density_col(i)));
        const Eigen::ArrayXcd grad_dn = kI * (geo->xi_diff[c] * dq.component(density_col(i)));
        const Eigen::ArrayXd w = geo->weight * sym;
        cross += (w * (s.q.component(velocity_col(i, c)).conjugate() * grad_n).real()).sum();
        cross_rate += (w * (dq.component(velocity_col(i, c)).conjugate() * grad_n +
                            s.q.component(velocity_col(i, c)).conjugate() * grad_dn).real()).sum();
      }
    }
    o.cross = cross;
    o.cross_rate = cross_rate;
    o.disparity = grad_norm(diff, k);
    o.laplacian_phi = grad_norm(lap_phi, k);
    o.field_gradient = grad_norm(gphi, k + 1);
    const double lhs = weighted_inner(diff, lap_phi, sym);
    const double rhs_sq = o.disparity * o.disparity;
    o.identity_defect = rhs_sq > 0.0 ? std::abs(lhs - rhs_sq) / rhs_sq : std::abs(lhs);
    diag.orders.push_back(o);
  }
  return diag;
}

std::vector<EnergyVerdict> energy_inequality_report(const std::vector<EnergyDiagnostics>& series, double K) {
  if (series.size() < 3) throw PreconditionError("energy_inequality_report: need at least 3 samples");
  std::vector<EnergyVerdict> out;
  for (std::size_t idx = 0; idx < series.front().orders.size(); ++idx) {
    EnergyVerdict v;
    v.k = series.front().orders[idx].k;
    v.lyapunov_pass = v.cross_pass = v.identity_pass = true;
    for (const auto& d : series) {
      const auto& o = d.orders.at(idx);
      const double ratio = o.reference > 0.0 ? (o.energy_rate + o.dissipation) / o.reference : 0.0;
      v.max_ratio = std::max(v.max_ratio, std::abs(ratio));
      if (d.delta > 0.0) v.max_ratio_over_delta = std::max(v.max_ratio_over_delta, std::abs(ratio) / d.delta);
      if (ratio > K * d.delta) v.lyapunov_pass = false;

      const double denom = o.dissipation + o.dissipation_next;
      const double num = o.cross_rate + v.cross_c * o.gradient_norm;
      const double C = denom > 0.0 ? num / denom : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      v.cross_C = std::max(v.cross_C, C);
      if (C > 1.0 + K * d.delta) v.cross_pass = false;

      v.max_identity_defect = std::max(v.max_identity_defect, o.identity_defect);
      const double ref = std::max(o.disparity, std::numeric_limits<double>::min());
      const double mismatch = std::max(std::abs(o.disparity - o.laplacian_phi), std::abs(o.disparity - o.field_gradient)) / ref;
      v.max_poisson_mismatch = std::max(v.max_poisson_mismatch, o.disparity > 0.0 ? mismatch : 0.0);
    }
    v.identity_pass = v.max_identity_defect <= 1e-10 && v.max_poisson_mismatch <= 1e-10;
    out.push_back(v);
  }
  return out;
}

RunResult run(const SpectralState& initial, const SolverConfig& cfg, const std::vector<NormSpec>& specs) {
  if (initial.grid() != cfg.grid) throw PreconditionError("run: initial state is not on cfg.grid");
  if (!(cfg.t_end > initial.time)) throw PreconditionError("run: t_end must exceed the initial time");
  if (!(cfg.output_cadence > 0.0)) throw PreconditionError("run: output cadence must be positive");
  if (cfg.dt < 0.0) throw PreconditionError("run: dt must be non-negative");
  for (const auto& spec : specs) validate(spec);

  RunResult result(cfg.grid);
  for (const auto& spec : specs) {
    NormSeries series;
    series.spec = spec;
    series.source = SeriesSource::nonlinear;
    series.provenance = "nonlinear n=" + std::to_string(cfg.grid.points_per_axis());
    result.norms.push_back(std::move(series));
  }
  SpectralState s = initial;
  auto record = [&] {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      result.norms[i].push(s.time, evaluate(specs[i], select_quantity(s, specs[i].field)));
    }
    if (!cfg.diagnostic_orders.empty()) result.diagnostics.push_back(energy_diagnostics(s, cfg));
  };

  try {
    record();
    double dt_limit = 0.0;
    int since_check = 16;
    for (long k = 1;; ++k) {
      double target = initial.time + k * cfg.output_cadence;
      const bool last = target >= cfg.t_end - 1e-12 * cfg.t_end;
      if (last) target = cfg.t_end;
      while (s.time < target) {
        if (since_check >= 16) {
          const double limit = cfl_limit(s, cfg);
          if (cfg.dt > 0.0 && cfg.dt > limit) {
            throw CflError("dt " + std::to_string(cfg.dt) + " exceeds the CFL limit " + std::to_string(limit));
          }
          dt_limit = cfg.dt > 0.0 ? cfg.dt : limit;
          since_check = 0;
        }
        const double remaining = target - s.time;
        const double pieces = std::ceil(remaining / dt_limit - 1e-9);
        const double dt = pieces <= 1.0 ? remaining : remaining / pieces;
        s = advance(s, cfg, dt);
        if (pieces <= 1.0) s.time = target;
        ++since_check;
        ++result.steps;
      }
      record();
      if (last) break;
    }
  } catch (const RuntimeFailure& e) {
    result.status = RunStatus::failed;
    result.message = e.what();
  }
  result.final_state = s;
  return result;
}

std::uint64_t stream_seed(std::uint64_t root, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = root ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SpectralState make_initial(const InitialParams& params, const Grid& grid) {
  SpectralState state(grid);
  const double amp[2] = {params.amplitude1, params.amplitude2};
  const double vel[2] = {params.velocity1, params.velocity2};

  if (params.family == InitialParams::Family::gaussian_bump) {
    if (!(params.width > 0.0)) throw PreconditionError("make_initial: width must be positive");
    const double c = grid.coordinate(grid.points_per_axis() / 2);
    for (int i = 0; i < 2; ++i) {
      const double x0 = c + (i == 1 ? params.offset : 0.0);
      const double w2 = params.width * params.width;
      const RealField bump = sample(grid, [&](double x, double y, double z) {
        return std::exp(-((x - x0) * (x - x0) + (y - c) * (y - c) + (z - c) * (z - c)) / w2);
      });
      const SpectralField b = to_spectral(bump);
      state.q.component(density_col(i)) = amp[i] * b.component(0);
      for (int k = 0; k < 3; ++k) state.q.component(velocity_col(i, k)) = vel[i] * b.component(0);
    }
  } else {
    const auto geo = geometry(grid);
    const double norm = std::pow(2.0 * std::numbers::pi, 1.5) / std::sqrt(grid.volume());
    static const char* names[kStateRank] = {"n1", "u1x", "u1y", "u1z", "n2", "u2x", "u2y", "u2z"};
    const int n = grid.points_per_axis();
    for (int col = 0; col < kStateRank; ++col) {
      const int species = col / 4;
      const double a = (col % 4 == 0 ? amp[species] : vel[species]) * norm;
      if (a == 0.0) continue;
      std::mt19937_64 gen(stream_seed(params.seed, names[col]));
      auto col_view = state.q.component(col);
      for (int i0 = 0; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
          for (int i2 = 0; i2 <= n / 2; ++i2) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            const auto m = grid.mode_index(i0, i1, i2);
            const double r = geo->xi_abs(m);
            if (m == 0) continue;
            const double mag = a * std::pow(r, params.sigma) * BesovPartition::eta(r / params.cutoff);
            col_view(m) = std::polar(mag, 2.0 * std::numbers::pi * u);
          }
        }
      }
      // Self-conjugate plane k3 = 0: copy conj of the canonical partner.
      for (int i0 = 0; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
          const int k0 = grid.wavenumber(i0), k1 = grid.wavenumber(i1);
          const bool canonical = k0 > 0 || (k0 == 0 && k1 > 0);
          if (!canonical) continue;
          const auto m = grid.mode_index(i0, i1, 0);
          const auto partner = grid.mode_index(grid.axis_index(-k0 == n / 2 ? -n / 2 : -k0),
                                               grid.axis_index(-k1 == n / 2 ? -n / 2 : -k1), 0);
          col_view(partner) = std::conj(col_view(m));
        }
      }
    }
  }

  const Complex m1 = state.q.mean_mode(density_col(0));
  const Complex m2 = state.q.mean_mode(density_col(1));
  switch (params.balance) {
    case InitialParams::Balance::strict:
      // Box truncation of offset bumps is absorbed; a real imbalance is not.
      if (std::abs(m1 - m2) > kStrictBalanceTolerance * (std::abs(m1) + std::abs(m2))) {
        throw ChargeImbalanceError("make_initial: species densities have different means");
      }
      state.q.coeffs()(0, density_col(1)) = m1;
      break;
    case InitialParams::Balance::match:
      state.q.coeffs()(0, density_col(1)) = m1;
      break;
    case InitialParams::Balance::zero_mean:
      state.q.coeffs().row(0).setZero();
      break;
  }
  zero_nyquist(state.q);
  return state;
}

}  // namespace bep
