#include "bep/checkpoint.hpp"

#include "bep/errors.hpp"
#include "bep/fft.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace bep {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "BEPCKPT1";
constexpr std::size_t kMagicSize = 8;

std::uint64_t fnv1a(const char* data, std::size_t size) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

template <class T>
void put(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

void put_string(std::string& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out += s;
}

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  template <class T>
  T get() {
    T value;
    std::memcpy(&value, take(sizeof(T)), sizeof(T));
    return value;
  }
  std::string get_string() {
    const auto size = get<std::uint64_t>();
    if (size > end_ - pos_) throw CheckpointError("checkpoint: string length past the end");
    return std::string(take(size), size);
  }
  const char* take(std::size_t size) {
    if (size > end_ - pos_) throw CheckpointError("checkpoint: truncated");
    const char* p = bytes_.data() + pos_;
    pos_ += size;
    return p;
  }
  std::size_t remaining() const { return end_ - pos_; }

 private:
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

const std::vector<std::string>& state_labels() {
  static const std::vector<std::string> labels{"n1", "u1x", "u1y", "u1z", "n2", "u2x", "u2y", "u2z"};
  return labels;
}

Checkpoint make_checkpoint(const SpectralState& s, std::string config_echo) {
  Checkpoint c(to_physical(s.q));
  c.config_echo = std::move(config_echo);
  c.time = s.time;
  c.labels = state_labels();
  return c;
}

SpectralState checkpoint_state(const Checkpoint& c) {
  if (c.labels != state_labels()) throw CheckpointError("checkpoint: not a solver state");
  return SpectralState(to_spectral(c.field), c.time);
}

std::string encode_checkpoint(const Checkpoint& c) {
  const Grid& grid = c.field.grid();
  if (static_cast<int>(c.labels.size()) != c.field.rank()) {
    throw PreconditionError("checkpoint: one label per component required");
  }
  std::string out(kMagic, kMagicSize);
  put_string(out, c.config_echo);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.points_per_axis()));
  put<double>(out, grid.box_length());
  put<double>(out, c.time);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.field.rank()));
  for (const auto& label : c.labels) put_string(out, label);
  const auto* raw = reinterpret_cast<const char*>(c.field.values().data());
  out.append(raw, sizeof(double) * static_cast<std::size_t>(c.field.values().size()));
  put<std::uint64_t>(out, fnv1a(out.data(), out.size()));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < kMagicSize + sizeof(std::uint64_t) || bytes.compare(0, kMagicSize, kMagic) != 0) {
    throw CheckpointError("checkpoint: bad magic");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof(stored));
  if (stored != fnv1a(bytes.data(), body)) throw CheckpointError("checkpoint: checksum mismatch");

  Reader in(bytes, body);
  in.take(kMagicSize);
  std::string echo = in.get_string();
  const auto n = in.get<std::uint32_t>();
  const auto L = in.get<double>();
  const auto time = in.get<double>();
  const auto rank = in.get<std::uint32_t>();
  if (n < 4 || n % 2 != 0 || n > 4096 || rank < 1 || rank > 64 || !(L > 0.0) || !std::isfinite(L)) {
    throw CheckpointError("checkpoint: bad header");
  }
  std::vector<std::string> labels;
  for (std::uint32_t i = 0; i < rank; ++i) labels.push_back(in.get_string());
  const std::size_t count = std::size_t(n) * n * n * rank;
  if (in.remaining() != count * sizeof(double)) throw CheckpointError("checkpoint: sample count mismatch");

  Grid grid(static_cast<int>(n), L);
  Eigen::ArrayXXd values(grid.num_points(), rank);
  std::memcpy(values.data(), in.take(count * sizeof(double)), count * sizeof(double));
  Checkpoint c(RealField(grid, std::move(values)));
  c.config_echo = std::move(echo);
  c.time = time;
  c.labels = std::move(labels);
  return c;
}

void write_checkpoint(const std::string& path, const Checkpoint& c) {
  const std::string bytes = encode_checkpoint(c);
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("checkpoint: cannot write " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace bep
