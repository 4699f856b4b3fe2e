// Copyright 2026 The Redaction Lab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REDLAB_CHECKPOINT_HPP
#define REDLAB_CHECKPOINT_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "redlab/gan.hpp"

namespace redlab {

// Layout: see docs/checkpoint.md. All integers and doubles little-endian.

inline constexpr char kCheckpointMagic[8] = {'R', 'D', 'L', 'B', 'G', 'A', 'N', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw CheckpointError("checkpoint truncated");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

inline void put_doubles(std::ostream& os, const std::vector<double>& v) {
  put<std::uint64_t>(os, v.size());
  for (double x : v) put<double>(os, x);
}

inline std::vector<double> get_doubles(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  if (n > (std::uint64_t{1} << 32)) throw CheckpointError("checkpoint: implausible array length");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = get<double>(is);
  return v;
}

inline void put_network(std::ostream& os, const MlpNetwork& net) {
  const auto& dims = net.layer_dims();
  put<std::uint32_t>(os, static_cast<std::uint32_t>(dims.size()));
  for (int d : dims) put<std::int32_t>(os, d);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(net.hidden_activation()));
  put<std::uint8_t>(os, static_cast<std::uint8_t>(net.output_squash()));
  put_doubles(os, net.params());
}

inline MlpNetwork get_network(std::istream& is) {
  const auto n = get<std::uint32_t>(is);
  if (n < 2 || n > 64) throw CheckpointError("checkpoint: bad layer count");
  std::vector<int> dims(n);
  for (int& d : dims) d = get<std::int32_t>(is);
  const auto act = get<std::uint8_t>(is);
  const auto squash = get<std::uint8_t>(is);
  if (act > 2 || squash > 2) throw CheckpointError("checkpoint: unknown activation tag");
  MlpNetwork net(dims, static_cast<Activation>(act), static_cast<OutputSquash>(squash));
  auto params = get_doubles(is);
  if (params.size() != net.num_params()) {
    throw CheckpointError("checkpoint: parameter count does not match layer dims");
  }
  net.params() = std::move(params);
  return net;
}

inline void put_adam(std::ostream& os, const AdamState& s) {
  put<std::uint64_t>(os, s.step);
  put_doubles(os, s.m);
  put_doubles(os, s.v);
}

inline AdamState get_adam(std::istream& is, std::size_t n) {
  AdamState s;
  s.step = get<std::uint64_t>(is);
  s.m = get_doubles(is);
  s.v = get_doubles(is);
  if (s.m.size() != n || s.v.size() != n) {
    throw CheckpointError("checkpoint: optimizer moments do not match parameters");
  }
  return s;
}

}  // namespace detail

inline void save_checkpoint(std::ostream& os, const GanModel& m) {
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put<std::uint32_t>(os, kCheckpointVersion);
  detail::put_network(os, m.generator);
  detail::put_network(os, m.discriminator);
  detail::put_adam(os, m.g_opt);
  detail::put_adam(os, m.d_opt);
  detail::put<std::int32_t>(os, m.latent_dim);
  detail::put<std::uint64_t>(os, m.seed);
  std::ostringstream rng;
  rng << m.rng;
  const std::string state = rng.str();
  detail::put<std::uint64_t>(os, state.size());
  os.write(state.data(), static_cast<std::streamsize>(state.size()));
  detail::put<std::uint64_t>(os, m.counters.d_updates);
  detail::put<std::uint64_t>(os, m.counters.g_updates);
  detail::put_doubles(os, m.d_loss_trace);
  detail::put_doubles(os, m.g_loss_trace);
  if (!os) throw CheckpointError("checkpoint: write failed");
}

inline GanModel load_checkpoint(std::istream& is) {
  char magic[sizeof(kCheckpointMagic)];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw CheckpointError("checkpoint: bad magic");
  }
  const auto version = detail::get<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint: unsupported version " + std::to_string(version));
  }
  GanModel m;
  m.generator = detail::get_network(is);
  m.discriminator = detail::get_network(is);
  m.g_opt = detail::get_adam(is, m.generator.num_params());
  m.d_opt = detail::get_adam(is, m.discriminator.num_params());
  m.latent_dim = detail::get<std::int32_t>(is);
  if (m.latent_dim != m.generator.input_dim()) {
    throw CheckpointError("checkpoint: latent size does not match generator");
  }
  m.seed = detail::get<std::uint64_t>(is);
  const auto len = detail::get<std::uint64_t>(is);
  if (len > (1u << 20)) throw CheckpointError("checkpoint: implausible RNG state");
  std::string state(static_cast<std::size_t>(len), '\0');
  if (!is.read(state.data(), static_cast<std::streamsize>(len))) {
    throw CheckpointError("checkpoint truncated");
  }
  std::istringstream rng(state);
  rng >> m.rng;
  if (!rng) throw CheckpointError("checkpoint: bad RNG state");
  m.counters.d_updates = detail::get<std::uint64_t>(is);
  m.counters.g_updates = detail::get<std::uint64_t>(is);
  m.d_loss_trace = detail::get_doubles(is);
  m.g_loss_trace = detail::get_doubles(is);
  return m;
}

inline void save_checkpoint(const std::string& path, const GanModel& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("checkpoint: cannot open " + path);
  save_checkpoint(os, m);
}

inline GanModel load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("checkpoint: cannot open " + path);
  return load_checkpoint(is);
}

}  // namespace redlab

#endif  // REDLAB_CHECKPOINT_HPP
