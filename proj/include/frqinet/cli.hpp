#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "frqinet/frqi.hpp"
#include "frqinet/qnn.hpp"
#include "frqinet/trainer.hpp"

namespace frqinet::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitTolerance = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int resolution = 8;
  EncodingMode mode = EncodingMode::Full;
  LayerType layer_type = LayerType::CRADL;
  int layers = 20;
  double lr = 0.02;
  int batch = 32;
  int epochs = 10;
  std::uint64_t seed = 7;
  double threshold = 0.5;
  std::filesystem::path data_dir;
  std::filesystem::path out_dir = "runs/latest";
  int threads = 0;  // 0: logical cores
  bool allow_large = false;
  bool baseline = false;
  int hidden1 = 4;
  int hidden2 = 4;
  std::size_t max_train = 0;  // 0: whole split
  std::size_t max_val = 0;
  GradMethod grad_method = GradMethod::BackwardSweep;
};

/// Throws UsageError. 16x16 full encoding needs allow_large.
void validate(const RunConfig& cfg);

/// log2 of the resolution.
int resolution_bits(const RunConfig& cfg);

/// Sets one field from its textual key (the long flag name without dashes).
/// Throws UsageError for unknown keys or unparsable values.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key=value` lines; `#` starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Every field as `key=value`, in a fixed order.
std::string config_echo(const RunConfig& cfg);

/// Entry point shared by the frqinet binary and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frqinet::cli
