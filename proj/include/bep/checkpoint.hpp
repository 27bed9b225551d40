#pragma once

#include "bep/field.hpp"
#include "bep/solver.hpp"

#include <string>
#include <vector>

namespace bep {

/// One saved field with its provenance. Layout (little-endian):
///   "BEPCKPT1"
///   u64 echo length, echo bytes (the resolved config that produced the field)
///   u32 n, f64 L, f64 time, u32 rank
///   per component: u64 label length, label bytes
///   rank * n^3 f64 samples, component-major in Grid::point_index order
///   u64 FNV-1a of every preceding byte
struct Checkpoint {
  std::string config_echo;
  double time = 0.0;
  std::vector<std::string> labels;
  RealField field;

  explicit Checkpoint(RealField f) : field(std::move(f)) {}
};

/// Component labels of a solver state, in state order.
const std::vector<std::string>& state_labels();

Checkpoint make_checkpoint(const SpectralState& s, std::string config_echo);
/// Throws CheckpointError unless the labels are the state labels.
SpectralState checkpoint_state(const Checkpoint& c);

std::string encode_checkpoint(const Checkpoint& c);
/// Throws CheckpointError on bad magic, truncation, bad sizes or checksum.
Checkpoint decode_checkpoint(const std::string& bytes);

void write_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace bep
