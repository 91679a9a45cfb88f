#include "frqinet/mnist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

namespace frqinet {

namespace {

std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

void need(std::span<const std::uint8_t> b, std::size_t n, const char* what) {
  if (b.size() < n) throw DataError(DataError::Kind::Truncated, std::string(what) + ": truncated");
}

}  // namespace

RawDataset parse_idx(std::span<const std::uint8_t> image_bytes,
                     std::span<const std::uint8_t> label_bytes) {
  need(image_bytes, 16, "image file");
  need(label_bytes, 8, "label file");
  if (be32(image_bytes, 0) != kIdxImageMagic) {
    throw DataError(DataError::Kind::BadMagic, "image file: magic mismatch");
  }
  if (be32(label_bytes, 0) != kIdxLabelMagic) {
    throw DataError(DataError::Kind::BadMagic, "label file: magic mismatch");
  }
  const std::size_t count = be32(image_bytes, 4);
  const std::size_t label_count = be32(label_bytes, 4);
  if (count != label_count) {
    throw DataError(DataError::Kind::CountMismatch, "image and label counts differ");
  }
  RawDataset ds;
  ds.rows = static_cast<int>(be32(image_bytes, 8));
  ds.cols = static_cast<int>(be32(image_bytes, 12));
  const std::size_t px = static_cast<std::size_t>(ds.rows) * static_cast<std::size_t>(ds.cols);
  need(image_bytes, 16 + count * px, "image file");
  need(label_bytes, 8 + count, "label file");

  ds.images.reserve(count);
  ds.labels.assign(label_bytes.begin() + 8, label_bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  for (auto l : ds.labels) {
    if (l > 9) throw DataError(DataError::Kind::BadValue, "label file: label outside 0..9");
  }
  for (std::size_t k = 0; k < count; ++k) {
    GrayImage img(ds.rows, ds.cols);
    std::copy_n(image_bytes.begin() + static_cast<std::ptrdiff_t>(16 + k * px), px, img.data());
    ds.images.push_back(std::move(img));
  }
  return ds;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(DataError::Kind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

RawDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto ib = read_file_bytes(images);
  const auto lb = read_file_bytes(labels);
  try {
    return parse_idx(ib, lb);
  } catch (const DataError& e) {
    throw DataError(e.kind(), images.filename().string() + " / " + labels.filename().string() +
                                  ": " + e.what());
  }
}

Eigen::MatrixXd downsample_bilinear(const GrayImage& grid, int side) {
  if (side < 1) throw std::invalid_argument("downsample_bilinear: side must be positive");
  const auto in_r = grid.rows(), in_c = grid.cols();
  auto axis = [side](Eigen::Index in, int i, Eigen::Index& lo, Eigen::Index& hi, double& w) {
    double src = (i + 0.5) * static_cast<double>(in) / side - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    lo = static_cast<Eigen::Index>(std::floor(src));
    hi = std::min(lo + 1, in - 1);
    w = src - static_cast<double>(lo);
  };
  Eigen::MatrixXd out(side, side);
  for (int i = 0; i < side; ++i) {
    Eigen::Index y0, y1;
    double wy;
    axis(in_r, i, y0, y1, wy);
    for (int j = 0; j < side; ++j) {
      Eigen::Index x0, x1;
      double wx;
      axis(in_c, j, x0, x1, wx);
      const double top = (1 - wx) * grid(y0, x0) + wx * grid(y0, x1);
      const double bot = (1 - wx) * grid(y1, x0) + wx * grid(y1, x1);
      out(i, j) = ((1 - wy) * top + wy * bot) / 255.0;
    }
  }
  return out;
}

BinaryImage binarize(const Eigen::MatrixXd& grid, double threshold) {
  if (grid.rows() != grid.cols()) throw std::invalid_argument("binarize: grid must be square");
  const int side = static_cast<int>(grid.rows());
  std::vector<std::uint8_t> px(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      px[static_cast<std::size_t>(r * side + c)] = grid(r, c) > threshold ? 1 : 0;
    }
  }
  return BinaryImage(side, std::move(px));
}

namespace {

std::vector<LabeledImage> filter_split(const RawDataset& raw, int side, double threshold) {
  std::vector<LabeledImage> out;
  for (std::size_t k = 0; k < raw.images.size(); ++k) {
    const int digit = raw.labels[k];
    if (digit != kPositiveDigit && digit != kNegativeDigit) continue;
    LabeledImage li;
    li.image = binarize(downsample_bilinear(raw.images[k], side), threshold);
    li.source_digit = digit;
    li.label = digit == kPositiveDigit ? 1 : -1;
    li.source_index = k;
    out.push_back(std::move(li));
  }
  if (out.empty()) throw DataError(DataError::Kind::Empty, "no digits 3 or 6 in dataset");
  return out;
}

}  // namespace

Splits build_splits(const RawDataset& train_raw, const RawDataset& test_raw, int side,
                    double threshold) {
  return {filter_split(train_raw, side, threshold), filter_split(test_raw, side, threshold)};
}

MnistFiles mnist_files(const std::filesystem::path& dir) {
  return {dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte",
          dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte"};
}

std::string split_manifest_csv(const std::vector<LabeledImage>& split) {
  std::string out = "index,source_digit,label\n";
  for (const auto& s : split) {
    out += std::to_string(s.source_index) + ',' + std::to_string(s.source_digit) + ',' +
           std::to_string(s.label) + '\n';
  }
  return out;
}

}  // namespace frqinet
