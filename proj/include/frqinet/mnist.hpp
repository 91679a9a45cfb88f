#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frqinet/frqi.hpp"

namespace frqinet {

class DataError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, Truncated, CountMismatch, BadValue, Empty, Io };

  DataError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using GrayImage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct RawDataset {
  int rows = 0;
  int cols = 0;
  std::vector<GrayImage> images;
  std::vector<std::uint8_t> labels;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Decodes an IDX3 image file and an IDX1 label file (big-endian headers).
RawDataset parse_idx(std::span<const std::uint8_t> image_bytes,
                     std::span<const std::uint8_t> label_bytes);

/// Reads and parses a pair of files; errors carry the file name.
RawDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Pixel values scaled to [0, 1], then bilinear resampling with half-pixel
/// centers: source coordinate (i + 0.5) * in / side - 0.5, clamped to the
/// image, neighbours clamped at the far edge.
Eigen::MatrixXd downsample_bilinear(const GrayImage& grid, int side);

/// Pixel is white iff value > threshold.
BinaryImage binarize(const Eigen::MatrixXd& grid, double threshold);

struct LabeledImage {
  BinaryImage image;
  int label = 1;          // +1 for digit 3, -1 for digit 6
  int source_digit = 3;
  std::size_t source_index = 0;  // position in the IDX file
};

struct Splits {
  std::vector<LabeledImage> train;
  std::vector<LabeledImage> val;
};

inline constexpr int kPositiveDigit = 3;
inline constexpr int kNegativeDigit = 6;

/// Digits 3 and 6 only; train from the training files, validation from the
/// test files, file order preserved.
Splits build_splits(const RawDataset& train_raw, const RawDataset& test_raw, int side,
                    double threshold);

/// Conventional MNIST file names under `dir`.
struct MnistFiles {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};
MnistFiles mnist_files(const std::filesystem::path& dir);

/// `index,source_digit,label` rows.
std::string split_manifest_csv(const std::vector<LabeledImage>& split);

}  // namespace frqinet
