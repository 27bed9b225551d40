#include "bep/fft.hpp"

#include "bep/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace bep {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW plans for one grid size. Execution through the new-array interface is
// thread-safe; planning is serialized by planner_mutex(). Plans assume
// fftw_malloc alignment, so execution always goes through Scratch buffers.
// FFTW_ESTIMATE keeps the chosen algorithm, hence the roundoff, reproducible.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  explicit PlanPair(int n) {
    const auto points = std::size_t(n) * n * n;
    const auto modes = std::size_t(n) * n * (n / 2 + 1);
    double* real = fftw_alloc_real(points);
    fftw_complex* spec = fftw_alloc_complex(modes);
    const unsigned flags = FFTW_ESTIMATE;
    forward = fftw_plan_dft_r2c_3d(n, n, n, real, spec, flags);
    inverse = fftw_plan_dft_c2r_3d(n, n, n, spec, real, flags);
    fftw_free(real);
    fftw_free(spec);
    if (forward == nullptr || inverse == nullptr) {
      throw Error("fft: planner failed for n = " + std::to_string(n));
    }
  }
  ~PlanPair() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
};

void init_threads_locked() {
  static bool done = false;
  if (done) return;
  done = true;
  const int threads = transform_threads();
  if (threads > 1) {
    fftw_init_threads();
    fftw_plan_with_nthreads(threads);
  }
}

const PlanPair& plans(int n) {
  static std::map<int, std::unique_ptr<PlanPair>> cache;
  const std::lock_guard lock(planner_mutex());
  init_threads_locked();
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<PlanPair>(n)).first;
  return *it->second;
}

// Per-thread aligned buffers for one grid size.
struct Scratch {
  int n = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;

  ~Scratch() { release(); }
  void release() {
    fftw_free(real);
    fftw_free(spec);
    real = nullptr;
    spec = nullptr;
  }
  void ensure(int size) {
    if (size == n) return;
    release();
    const auto points = std::size_t(size) * size * size;
    const auto modes = std::size_t(size) * size * (size / 2 + 1);
    real = fftw_alloc_real(points);
    spec = fftw_alloc_complex(modes);
    n = size;
  }
};

Scratch& scratch_for(int n) {
  thread_local Scratch s;
  s.ensure(n);
  return s;
}

}  // namespace

int transform_threads() {
  static const int threads = [] {
    const char* env = std::getenv("BEP_NUM_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
  }();
  return threads;
}

SpectralField to_spectral(const RealField& f) {
  if (!f.all_finite()) throw NonFiniteError("to_spectral: field has non-finite samples");
  const Grid& grid = f.grid();
  const int n = grid.points_per_axis();
  const PlanPair& p = plans(n);
  Scratch& buf = scratch_for(n);
  SpectralField out(grid, Eigen::ArrayXXcd(grid.num_modes(), f.rank()));
  Eigen::Map<Eigen::ArrayXd> real(buf.real, grid.num_points());
  Eigen::Map<Eigen::ArrayXcd> spec(reinterpret_cast<Complex*>(buf.spec), grid.num_modes());
  const double scale = std::sqrt(grid.volume()) / static_cast<double>(grid.num_points());
  for (int c = 0; c < f.rank(); ++c) {
    real = f.component(c);
    fftw_execute_dft_r2c(p.forward, buf.real, buf.spec);
    out.component(c) = spec * scale;
  }
  return out;
}

RealField to_physical(const SpectralField& f) {
  const Grid& grid = f.grid();
  const int n = grid.points_per_axis();
  const PlanPair& p = plans(n);
  Scratch& buf = scratch_for(n);
  RealField out(grid, Eigen::ArrayXXd(grid.num_points(), f.rank()));
  Eigen::Map<Eigen::ArrayXd> real(buf.real, grid.num_points());
  Eigen::Map<Eigen::ArrayXcd> spec(reinterpret_cast<Complex*>(buf.spec), grid.num_modes());
  const double scale = 1.0 / std::sqrt(grid.volume());
  // c2r destroys its input, which is the scratch copy.
  for (int c = 0; c < f.rank(); ++c) {
    spec = f.component(c);
    fftw_execute_dft_c2r(p.inverse, buf.spec, buf.real);
    out.component(c) = real * scale;
  }
  return out;
}

}  // namespace bep
