#pragma once

#include "bep/field.hpp"

#include <vector>

namespace bep {

/// Radial Littlewood-Paley partition built on the bump
/// eta(r) = S(2 - r) / (S(2 - r) + S(r - 1)), S(t) = exp(-1/t) for t > 0.
/// phi(r) = eta(r) - eta(2r) and phi_j(r) = phi(2^-j r).
class BesovPartition {
 public:
  static double eta(double r);
  static double phi(double r);
  static double phi(int j, double r);

  /// Blocks that can meet the lattice of grid:
  /// [floor(log2(2 pi/L)) - 1, ceil(log2(pi n/L)) + 1].
  static int j_min(const Grid& grid);
  static int j_max(const Grid& grid);

  /// Largest |sum_j phi_j(|xi|) - 1| over the nonzero lattice.
  static double partition_defect(const Grid& grid);
};

struct DyadicBlock {
  int j;
  SpectralField block;
};

/// Delta_j f, the multiplier phi_j(|xi|).
DyadicBlock dyadic_block(const SpectralField& f, int j);

struct BlockNorm {
  int j;
  double norm;  ///< ||Delta_j f||_{L2}
};
std::vector<BlockNorm> besov_blocks(const SpectralField& f);

/// sup_j 2^{-sj} ||Delta_j f||_{L2} over the grid's block range; s in (0, 3/2].
/// The zero mode must vanish (relative 1e-10), else InfiniteNormError.
double besov_norm(const SpectralField& f, double s);

/// sup over x in [1/2, 2] of x^s phi(x): the constant in
/// besov_norm(f, s) <= C_emb(s) * hdot_norm(f, -s).
double besov_embedding_constant(double s);

}  // namespace bep
