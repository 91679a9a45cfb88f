#pragma once

// FRQI encoding of binary images.
//
// Register layout (Full): 2n pixel qubits, row bits first, then one color
// qubit as the least-significant bit. A pixel at (row, col) is the basis
// index (row << n) | col of the pixel qubits.
//
// CompressedMinus2Q folds the two lowest pixel bits (q_{2n-2}, q_{2n-1})
// into the color angle:
//   theta~ = (pi/2) * (q_c + q_{2n-2}/2 + q_{2n-1}/4)
// leaving 2n-2 pixel qubits plus the color qubit. Each reduced basis state
// collects the four rotated color spinors of its pixel group; the sum is
// renormalized globally.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "frqinet/circuit.hpp"
#include "frqinet/statevector.hpp"

namespace frqinet {

enum class EncodingMode : std::uint8_t { Full = 0, CompressedMinus2Q = 1 };

std::string_view mode_name(EncodingMode mode);
EncodingMode parse_mode(std::string_view name);  // "full" | "minus2q"

class BinaryImage {
 public:
  BinaryImage() = default;
  /// All-black image; `side` must be a power of two.
  explicit BinaryImage(int side);
  BinaryImage(int side, std::vector<std::uint8_t> pixels);  // row-major, values 0/1

  int side() const { return side_; }
  int log2_side() const { return n_; }
  std::size_t pixel_count() const { return pixels_.size(); }
  std::size_t white_count() const;

  bool at(int row, int col) const { return pixels_[index(row, col)] != 0; }
  void set(int row, int col, bool white) { pixels_[index(row, col)] = white ? 1 : 0; }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  bool operator==(const BinaryImage&) const = default;

 private:
  std::size_t index(int row, int col) const;

  int side_ = 0;
  int n_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Row bits (most significant) followed by column bits.
std::uint64_t pixel_to_basis(int row, int col, int n);

/// Number of qubits of the encoded data state (without readout).
int encoded_qubits(int n, EncodingMode mode);
/// Number of pixel qubits left after encoding.
int encoded_pixel_qubits(int n, EncodingMode mode);

/// Compressed color angle of a pixel bit given the two folded pixel bits.
double compressed_angle(int color_bit, int high_bit, int low_bit);

Statevector frqi_state_direct(const BinaryImage& img, EncodingMode mode);

/// Encoding circuit from |0...0>: Hadamards on the pixel qubits, then one
/// X-conjugated multi-controlled gate (expanded to one-control gates) per
/// white pixel (Full) or per reduced pixel group (CompressedMinus2Q).
///
/// Full mode reproduces frqi_state_direct. Compressed mode prepares every
/// group with equal weight; its color spinor per group equals the direct
/// state's spinor for that group normalized to unit length.
Circuit frqi_circuit(const BinaryImage& img, EncodingMode mode);

/// Each color spinor (pair of amplitudes differing in the last qubit)
/// scaled to unit length, all pairs weighted equally. This is what the
/// compressed circuit prepares from the direct compressed state.
Statevector group_normalized(const Statevector& state);

// Encoded-state cache:
//   "FRQI" | version u8 | n u8 | mode u8 | count u32 LE
//   then per state 2^qubits pairs of little-endian f64 (re, im).
struct StateCache {
  int n = 0;
  EncodingMode mode = EncodingMode::Full;
  std::vector<Statevector> states;
};

inline constexpr std::uint8_t kStateCacheVersion = 1;

void write_state_cache(const std::filesystem::path& path, const StateCache& cache);
StateCache read_state_cache(const std::filesystem::path& path);

}  // namespace frqinet
