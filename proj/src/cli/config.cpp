#include <charconv>
#include <fstream>
#include <sstream>

#include "frqinet/cli.hpp"

namespace frqinet::cli {

void validate(const RunConfig& cfg) {
  if (cfg.resolution != 8 && cfg.resolution != 16 && cfg.resolution != 4 && cfg.resolution != 2) {
    throw UsageError("resolution must be one of 2, 4, 8, 16");
  }
  if (cfg.resolution == 16 && cfg.mode == EncodingMode::Full && !cfg.allow_large && !cfg.baseline) {
    throw UsageError("16x16 with full encoding needs a 10-qubit register; pass --allow-large");
  }
  if (cfg.mode == EncodingMode::CompressedMinus2Q && cfg.resolution < 4 && !cfg.baseline) {
    throw UsageError("minus2q encoding needs resolution >= 4");
  }
  if (cfg.layers < 0) throw UsageError("layers must be >= 0");
  if (!(cfg.lr >= 0.0)) throw UsageError("lr must be >= 0");
  if (cfg.batch < 1) throw UsageError("batch must be >= 1");
  if (cfg.epochs < 0) throw UsageError("epochs must be >= 0");
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw UsageError("threshold must be in (0, 1)");
  if (cfg.threads < 0) throw UsageError("threads must be >= 0");
  if (cfg.hidden1 < 1 || cfg.hidden2 < 1) throw UsageError("hidden sizes must be >= 1");
}

int resolution_bits(const RunConfig& cfg) {
  int n = 0;
  while ((1 << n) < cfg.resolution) ++n;
  return n;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw UsageError("bad value for " + key + ": " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError("bad boolean for " + key + ": " + v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "resolution") cfg.resolution = parse_number<int>(key, value);
    else if (key == "mode") cfg.mode = parse_mode(value);
    else if (key == "layer-type") cfg.layer_type = parse_layer(value);
    else if (key == "layers") cfg.layers = parse_number<int>(key, value);
    else if (key == "lr") cfg.lr = parse_number<double>(key, value);
    else if (key == "batch") cfg.batch = parse_number<int>(key, value);
    else if (key == "epochs") cfg.epochs = parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "threshold") cfg.threshold = parse_number<double>(key, value);
    else if (key == "data-dir") cfg.data_dir = value;
    else if (key == "out") cfg.out_dir = value;
    else if (key == "threads") cfg.threads = parse_number<int>(key, value);
    else if (key == "allow-large") cfg.allow_large = parse_bool(key, value);
    else if (key == "baseline") cfg.baseline = parse_bool(key, value);
    else if (key == "hidden1") cfg.hidden1 = parse_number<int>(key, value);
    else if (key == "hidden2") cfg.hidden2 = parse_number<int>(key, value);
    else if (key == "max-train") cfg.max_train = parse_number<std::size_t>(key, value);
    else if (key == "max-val") cfg.max_val = parse_number<std::size_t>(key, value);
    else if (key == "grad") {
      if (value == "backward") cfg.grad_method = GradMethod::BackwardSweep;
      else if (value == "shift") cfg.grad_method = GradMethod::ParameterShift;
      else throw UsageError("grad must be backward or shift");
    } else {
      throw UsageError("unknown config key: " + key);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream os;
  os << "resolution=" << cfg.resolution << '\n'
     << "mode=" << mode_name(cfg.mode) << '\n'
     << "layer-type=" << layer_name(cfg.layer_type) << '\n'
     << "layers=" << cfg.layers << '\n'
     << "lr=" << cfg.lr << '\n'
     << "batch=" << cfg.batch << '\n'
     << "epochs=" << cfg.epochs << '\n'
     << "seed=" << cfg.seed << '\n'
     << "threshold=" << cfg.threshold << '\n'
     << "data-dir=" << cfg.data_dir.string() << '\n'
     << "out=" << cfg.out_dir.string() << '\n'
     << "threads=" << cfg.threads << '\n'
     << "allow-large=" << (cfg.allow_large ? "true" : "false") << '\n'
     << "baseline=" << (cfg.baseline ? "true" : "false") << '\n'
     << "hidden1=" << cfg.hidden1 << '\n'
     << "hidden2=" << cfg.hidden2 << '\n'
     << "max-train=" << cfg.max_train << '\n'
     << "max-val=" << cfg.max_val << '\n'
     << "grad=" << (cfg.grad_method == GradMethod::BackwardSweep ? "backward" : "shift") << '\n';
  return os.str();
}

}  // namespace frqinet::cli
