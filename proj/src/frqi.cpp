#include "frqinet/frqi.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace frqinet {

std::string_view mode_name(EncodingMode mode) {
  return mode == EncodingMode::Full ? "full" : "minus2q";
}

EncodingMode parse_mode(std::string_view name) {
  if (name == "full") return EncodingMode::Full;
  if (name == "minus2q") return EncodingMode::CompressedMinus2Q;
  throw std::invalid_argument("unknown encoding mode: " + std::string(name));
}

BinaryImage::BinaryImage(int side)
    : BinaryImage(side, std::vector<std::uint8_t>(static_cast<std::size_t>(side) * side, 0)) {}

BinaryImage::BinaryImage(int side, std::vector<std::uint8_t> pixels)
    : side_(side), pixels_(std::move(pixels)) {
  if (side < 1 || !std::has_single_bit(static_cast<unsigned>(side))) {
    throw std::invalid_argument("BinaryImage: side must be a power of two");
  }
  if (pixels_.size() != static_cast<std::size_t>(side) * side) {
    throw std::invalid_argument("BinaryImage: pixel count must be side^2");
  }
  for (auto& p : pixels_) {
    if (p > 1) throw std::invalid_argument("BinaryImage: pixels must be 0 or 1");
  }
  n_ = std::countr_zero(static_cast<unsigned>(side));
}

std::size_t BinaryImage::white_count() const {
  std::size_t w = 0;
  for (auto p : pixels_) w += p;
  return w;
}

std::size_t BinaryImage::index(int row, int col) const {
  if (row < 0 || col < 0 || row >= side_ || col >= side_) {
    throw std::out_of_range("BinaryImage: pixel out of range");
  }
  return static_cast<std::size_t>(row) * static_cast<std::size_t>(side_) +
         static_cast<std::size_t>(col);
}

std::uint64_t pixel_to_basis(int row, int col, int n) {
  const int side = 1 << n;
  if (n < 0 || row < 0 || col < 0 || row >= side || col >= side) {
    throw std::out_of_range("pixel_to_basis: coordinates out of range");
  }
  return (static_cast<std::uint64_t>(row) << n) | static_cast<std::uint64_t>(col);
}

int encoded_pixel_qubits(int n, EncodingMode mode) {
  return mode == EncodingMode::Full ? 2 * n : 2 * n - 2;
}

int encoded_qubits(int n, EncodingMode mode) { return encoded_pixel_qubits(n, mode) + 1; }

double compressed_angle(int color_bit, int high_bit, int low_bit) {
  return std::numbers::pi / 2 * (color_bit + high_bit / 2.0 + low_bit / 4.0);
}

namespace {

Statevector full_state(const BinaryImage& img) {
  const int n = img.log2_side();
  const double w = std::ldexp(1.0, -n);
  Statevector::Amplitudes a = Statevector::Amplitudes::Zero(Eigen::Index{2} << (2 * n));
  for (int r = 0; r < img.side(); ++r) {
    for (int c = 0; c < img.side(); ++c) {
      const auto q = static_cast<Eigen::Index>(pixel_to_basis(r, c, n));
      // theta_q is 0 or pi/2: the color spinor is exactly |0> or |1>.
      a(2 * q + (img.at(r, c) ? 1 : 0)) = w;
    }
  }
  return Statevector(std::move(a));
}

// Applies the basis-state map to every component of the Full state; returns
// the unnormalized reduced amplitudes.
Statevector::Amplitudes fold_two_qubits(const Statevector& full) {
  const Eigen::Index groups = full.dim() / 8;
  Statevector::Amplitudes out = Statevector::Amplitudes::Zero(groups * 2);
  for (Eigen::Index i = 0; i < full.dim(); ++i) {
    const auto amp = full[i];
    if (amp == std::complex<double>(0)) continue;
    const auto ui = static_cast<std::uint64_t>(i);
    const int color = static_cast<int>(ui & 1);
    const int low = static_cast<int>((ui >> 1) & 1);
    const int high = static_cast<int>((ui >> 2) & 1);
    const auto g = static_cast<Eigen::Index>(ui >> 3);
    const double t = compressed_angle(color, high, low);
    out(2 * g) += amp * std::cos(t);
    out(2 * g + 1) += amp * std::sin(t);
  }
  return out;
}

}  // namespace

Statevector frqi_state_direct(const BinaryImage& img, EncodingMode mode) {
  if (img.side() == 0) throw std::invalid_argument("frqi_state_direct: empty image");
  Statevector full = full_state(img);
  if (mode == EncodingMode::Full) return full;
  Statevector::Amplitudes reduced = fold_two_qubits(full);
  reduced /= reduced.norm();
  return Statevector(std::move(reduced));
}

namespace {

// X on each pixel qubit whose bit in `index` is 0, so the all-ones control
// pattern selects `index`.
void conjugating_x(Circuit& c, std::uint64_t index, int pixel_qubits) {
  for (int q = 0; q < pixel_qubits; ++q) {
    const bool bit = (index >> (pixel_qubits - 1 - q)) & 1;
    if (!bit) c.append(gates::x(q));
  }
}

}  // namespace

Circuit frqi_circuit(const BinaryImage& img, EncodingMode mode) {
  const int n = img.log2_side();
  const int pixel_qubits = encoded_pixel_qubits(n, mode);
  const int color = pixel_qubits;
  if (pixel_qubits < 0) throw std::invalid_argument("frqi_circuit: image too small for mode");
  Circuit c(pixel_qubits + 1);
  for (int q = 0; q < pixel_qubits; ++q) c.append(gates::h(q));

  std::vector<int> controls(static_cast<std::size_t>(pixel_qubits));
  for (int q = 0; q < pixel_qubits; ++q) controls[static_cast<std::size_t>(q)] = q;

  if (mode == EncodingMode::Full) {
    const Circuit flip = decompose_mcx(controls, color, c.num_qubits());
    for (int r = 0; r < img.side(); ++r) {
      for (int col = 0; col < img.side(); ++col) {
        if (!img.at(r, col)) continue;
        const auto q = pixel_to_basis(r, col, n);
        conjugating_x(c, q, pixel_qubits);
        c.append(flip);
        conjugating_x(c, q, pixel_qubits);
      }
    }
    return c;
  }

  const Statevector::Amplitudes spinors = fold_two_qubits(full_state(img));
  const Eigen::Index groups = spinors.size() / 2;
  for (Eigen::Index g = 0; g < groups; ++g) {
    const double phi = std::atan2(spinors(2 * g + 1).real(), spinors(2 * g).real());
    if (phi == 0.0) continue;
    const auto index = static_cast<std::uint64_t>(g);
    conjugating_x(c, index, pixel_qubits);
    c.append(decompose_mc_ry(controls, color, 2 * phi, c.num_qubits()));
    conjugating_x(c, index, pixel_qubits);
  }
  return c;
}

Statevector group_normalized(const Statevector& state) {
  if (state.num_qubits() < 1) throw std::invalid_argument("group_normalized: need a color qubit");
  Statevector::Amplitudes out = state.amplitudes();
  const Eigen::Index groups = out.size() / 2;
  const double w = 1.0 / std::sqrt(static_cast<double>(groups));
  for (Eigen::Index g = 0; g < groups; ++g) {
    auto pair = out.segment(2 * g, 2);
    const double len = pair.norm();
    if (len == 0.0) {
      pair << w, 0.0;
    } else {
      pair *= w / len;
    }
  }
  return Statevector(std::move(out));
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_le(std::istream& is, int bytes) {
  unsigned char b[8] = {};
  if (!is.read(reinterpret_cast<char*>(b), bytes)) {
    throw std::runtime_error("state cache: truncated file");
  }
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

void write_state_cache(const std::filesystem::path& path, const StateCache& cache) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("state cache: cannot open " + path.string());
  const int qubits = encoded_qubits(cache.n, cache.mode);
  os.write("FRQI", 4);
  const char hdr[3] = {static_cast<char>(kStateCacheVersion), static_cast<char>(cache.n),
                       static_cast<char>(cache.mode)};
  os.write(hdr, 3);
  put_u32(os, static_cast<std::uint32_t>(cache.states.size()));
  for (const auto& s : cache.states) {
    if (s.num_qubits() != qubits) throw std::invalid_argument("state cache: state size mismatch");
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
      put_f64(os, s[i].real());
      put_f64(os, s[i].imag());
    }
  }
  if (!os) throw std::runtime_error("state cache: write failed");
}

StateCache read_state_cache(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("state cache: cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "FRQI", 4) != 0) {
    throw std::runtime_error("state cache: bad magic");
  }
  const auto version = get_le(is, 1);
  if (version != kStateCacheVersion) throw std::runtime_error("state cache: unsupported version");
  StateCache cache;
  cache.n = static_cast<int>(get_le(is, 1));
  const auto mode = get_le(is, 1);
  if (mode > 1) throw std::runtime_error("state cache: bad mode");
  cache.mode = static_cast<EncodingMode>(mode);
  const auto count = get_le(is, 4);
  const int qubits = encoded_qubits(cache.n, cache.mode);
  if (qubits < 1 || qubits > 30) throw std::runtime_error("state cache: bad size");
  cache.states.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    Statevector::Amplitudes a(Eigen::Index{1} << qubits);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double re = std::bit_cast<double>(get_le(is, 8));
      const double im = std::bit_cast<double>(get_le(is, 8));
      a(i) = {re, im};
    }
    cache.states.emplace_back(std::move(a));
  }
  return cache;
}

}  // namespace frqinet
