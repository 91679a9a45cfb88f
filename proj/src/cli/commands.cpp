#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "frqinet/circuit.hpp"
#include "frqinet/cli.hpp"
#include "frqinet/dense_net.hpp"
#include "frqinet/gradients.hpp"
#include "frqinet/mnist.hpp"
#include "frqinet/parallel.hpp"
#include "frqinet/trainer.hpp"

namespace frqinet::cli {

namespace {

namespace fs = std::filesystem;

struct OptionDef {
  const char* key;
  const char* help;
  bool flag;
};

constexpr OptionDef kOptions[] = {
    {"resolution", "image side after downsampling (8 or 16)", false},
    {"mode", "encoding: full | minus2q", false},
    {"layer-type", "cradl | craml", false},
    {"layers", "number of double layers L", false},
    {"lr", "SGD learning rate", false},
    {"batch", "mini-batch size", false},
    {"epochs", "training epochs", false},
    {"seed", "RNG seed for init and shuffling", false},
    {"threshold", "binarization threshold on [0,1] intensities", false},
    {"data-dir", "directory with the four MNIST IDX files", false},
    {"out", "output directory", false},
    {"threads", "worker threads (0: logical cores)", false},
    {"allow-large", "permit the 10-qubit 16x16 full register", true},
    {"baseline", "use the classical dense network", true},
    {"hidden1", "baseline first hidden width", false},
    {"hidden2", "baseline second hidden width", false},
    {"max-train", "use only the first N training samples (0: all)", false},
    {"max-val", "use only the first N validation samples (0: all)", false},
    {"grad", "gradient evaluation: backward | shift", false},
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void add_common_options(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
  for (const auto& d : kOptions) {
    const std::string key = d.key;
    if (d.flag) {
      sub->add_flag_function(
          "--" + key, [&cfg, key](std::int64_t) { apply_config_value(cfg, key, "true"); }, d.help);
    } else {
      sub->add_option_function<std::string>(
          "--" + key, [&cfg, key](const std::string& v) { apply_config_value(cfg, key, v); },
          d.help);
    }
  }
  sub->add_option("--config", config_path, "key=value file; command-line flags take precedence");
}

// Fills keys not given on the command line from the config file, then the
// data directory from the environment when still unset.
void finish_config(CLI::App* sub, RunConfig& cfg, const std::string& config_path) {
  if (!config_path.empty()) {
    for (const auto& [key, value] : read_config_file(config_path)) {
      const auto* opt = sub->get_option_no_throw("--" + key);
      if (opt == nullptr) throw UsageError("unknown config key: " + key);
      if (opt->count() == 0) apply_config_value(cfg, key, value);
    }
  }
  if (cfg.data_dir.empty()) {
    const char* env = std::getenv("FRQINET_DATA_DIR");
    cfg.data_dir = env && *env ? fs::path(env) : fs::path("data/mnist");
  }
}

std::string sha256_file(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

Splits load_splits(const RunConfig& cfg) {
  const auto files = mnist_files(cfg.data_dir);
  const RawDataset train_raw = load_idx(files.train_images, files.train_labels);
  const RawDataset test_raw = load_idx(files.test_images, files.test_labels);
  Splits s = build_splits(train_raw, test_raw, cfg.resolution, cfg.threshold);
  if (cfg.max_train > 0 && s.train.size() > cfg.max_train) s.train.resize(cfg.max_train);
  if (cfg.max_val > 0 && s.val.size() > cfg.max_val) s.val.resize(cfg.max_val);
  return s;
}

std::vector<EncodedSample> encode_split(const std::vector<LabeledImage>& split, EncodingMode mode,
                                        const WorkerPool& pool) {
  std::vector<EncodedSample> out(split.size());
  pool.parallel_for(split.size(), [&](std::size_t i) {
    out[i] = {frqi_state_direct(split[i].image, mode), split[i].label};
  });
  return out;
}

std::size_t count_label(const std::vector<LabeledImage>& split, int label) {
  return static_cast<std::size_t>(std::count_if(
      split.begin(), split.end(), [label](const LabeledImage& s) { return s.label == label; }));
}

std::string dataset_summary(const Splits& s) {
  std::ostringstream os;
  os << "train_count=" << s.train.size() << '\n'
     << "train_digit3=" << count_label(s.train, 1) << '\n'
     << "train_digit6=" << count_label(s.train, -1) << '\n'
     << "val_count=" << s.val.size() << '\n'
     << "val_digit3=" << count_label(s.val, 1) << '\n'
     << "val_digit6=" << count_label(s.val, -1) << '\n';
  return os.str();
}

std::string data_hashes(const RunConfig& cfg) {
  const auto f = mnist_files(cfg.data_dir);
  std::ostringstream os;
  for (const auto& p : {f.train_images, f.train_labels, f.test_images, f.test_labels}) {
    os << "sha256." << p.filename().string() << '=' << sha256_file(p) << '\n';
  }
  return os.str();
}

std::string epoch_line(const EpochMetrics& m) {
  std::ostringstream os;
  os << "epoch " << m.epoch << "  train_loss " << fmt("%.6f", m.train_loss) << "  train_acc "
     << fmt("%.6f", m.train_acc) << "  val_acc " << fmt("%.6f", m.val_acc);
  return os.str();
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const WorkerPool pool(static_cast<std::size_t>(cfg.threads));
  const Splits splits = load_splits(cfg);
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir / "train_split.csv", split_manifest_csv(splits.train));
  write_text(cfg.out_dir / "val_split.csv", split_manifest_csv(splits.val));
  out << "train " << splits.train.size() << " samples, val " << splits.val.size() << " samples\n";

  const TrainOptions opts{cfg.lr, cfg.batch, cfg.grad_method};
  auto report = [&out](const EpochMetrics& m) { out << epoch_line(m) << std::endl; };
  std::vector<EpochMetrics> history;
  int params = 0;

  if (cfg.baseline) {
    const int in = cfg.resolution * cfg.resolution;
    DenseNet net = DenseNet::random(in, cfg.hidden1, cfg.hidden2, cfg.seed);
    params = net.num_params();
    out << "model dense " << in << '-' << cfg.hidden1 << '-' << cfg.hidden2 << "-1, " << params
        << " trainable parameters\n";
    const auto train = baseline_samples(splits.train);
    const auto val = baseline_samples(splits.val);
    MlpTrainResult r = mlp_train(std::move(net), train, val, opts, cfg.epochs, cfg.seed, pool, report);
    history = std::move(r.history);
    write_text(cfg.out_dir / "model.txt", dense_net_to_text(r.net));
  } else {
    ModelSpec spec;
    spec.layer_type = cfg.layer_type;
    spec.num_layers = cfg.layers;
    spec.mode = cfg.mode;
    spec.num_pixel_qubits = encoded_pixel_qubits(resolution_bits(cfg), cfg.mode);
    const QnnModel model(spec);
    params = model.num_params();
    out << "model " << layer_name(spec.layer_type) << " L=" << spec.num_layers << ", "
        << spec.num_qubits() << " qubits, " << params << " trainable parameters\n";
    const auto train = encode_split(splits.train, cfg.mode, pool);
    const auto val = encode_split(splits.val, cfg.mode, pool);
    TrainState state;
    state.params = init_params(spec, cfg.seed);
    state.rng_seed = cfg.seed;
    state = frqinet::train(std::move(state), train, val, model, opts, cfg.epochs, pool, report);
    history = std::move(state.history);
    save_model(cfg.out_dir / "model.txt", SavedModel{spec, cfg.seed, state.params});
  }

  write_metrics_csv(cfg.out_dir / "metrics.csv", history);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream manifest;
  manifest << "command=train\n"
           << config_echo(cfg) << dataset_summary(splits) << "params=" << params << '\n'
           << data_hashes(cfg) << "wall_seconds=" << fmt("%.3f", wall) << '\n';
  write_text(cfg.out_dir / "manifest.txt", manifest.str());
  out << "wrote " << (cfg.out_dir / "metrics.csv").string() << " (" << fmt("%.1f", wall) << " s)\n";
  return kExitOk;
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

int cmd_eval(RunConfig cfg, const fs::path& model_path, const std::string& split_name,
             std::ostream& out) {
  const std::string text = read_text(model_path);
  const bool use_train = split_name == "train";
  if (!use_train && split_name != "val") throw UsageError("--split must be train or val");
  const WorkerPool pool(static_cast<std::size_t>(cfg.threads));
  EvalResult r;
  std::size_t count = 0;
  if (text.rfind("dense_net", 0) == 0) {
    const DenseNet net = dense_net_from_text(text);
    cfg.resolution = static_cast<int>(std::lround(std::sqrt(net.inputs())));
    if (cfg.resolution * cfg.resolution != net.inputs()) throw UsageError("model input is not square");
    const Splits s = load_splits(cfg);
    const auto data = baseline_samples(use_train ? s.train : s.val);
    r = mlp_evaluate(net, data);
    count = data.size();
  } else {
    const SavedModel m = model_from_text(text);
    const int p = m.spec.num_pixel_qubits;
    const int n = m.spec.mode == EncodingMode::Full ? p / 2 : (p + 2) / 2;
    cfg.resolution = 1 << n;
    const Splits s = load_splits(cfg);
    const QnnModel model(m.spec);
    const auto data = encode_split(use_train ? s.train : s.val, m.spec.mode, pool);
    r = evaluate(m.params, model, data, pool);
    count = data.size();
  }
  out << "split=" << split_name << " count=" << count << " accuracy=" << fmt("%.6f", r.accuracy)
      << " mean_loss=" << fmt("%.6f", r.mean_loss) << '\n';
  return kExitOk;
}

struct EncodeOptions {
  long index = -1;
  std::string split = "train";
  std::string synthetic;
  bool dump_circuit = false;
  bool dump_state = false;
  bool verify = false;
  bool count_gates = false;
  std::string cache_out;
};

BinaryImage synthetic_image(const std::string& name, int side, std::uint64_t seed) {
  BinaryImage img(side);
  std::mt19937_64 rng(seed);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      bool w = false;
      if (name == "black") w = false;
      else if (name == "white") w = true;
      else if (name == "checker") w = (r + c) % 2 == 1;
      else if (name == "random") w = (rng() & 1) != 0;
      else throw UsageError("--synthetic must be black, white, checker or random");
      img.set(r, c, w);
    }
  }
  return img;
}

double max_deviation(const Statevector& a, const Statevector& b) {
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
}

int cmd_encode(const RunConfig& cfg, const EncodeOptions& o, std::ostream& out) {
  validate(cfg);
  const bool have_image = o.index >= 0 || !o.synthetic.empty();
  if (o.index >= 0 && !o.synthetic.empty()) throw UsageError("--index and --synthetic are exclusive");
  if (!have_image && o.cache_out.empty()) throw UsageError("encode needs --index, --synthetic or --cache-out");
  if (o.split != "train" && o.split != "val") throw UsageError("--split must be train or val");
  const int n = resolution_bits(cfg);

  std::optional<Splits> splits;
  if (o.index >= 0 || !o.cache_out.empty()) splits = load_splits(cfg);
  const auto* split = splits ? (o.split == "train" ? &splits->train : &splits->val) : nullptr;

  if (!o.cache_out.empty()) {
    const WorkerPool pool(static_cast<std::size_t>(cfg.threads));
    StateCache cache{n, cfg.mode, {}};
    for (auto& s : encode_split(*split, cfg.mode, pool)) cache.states.push_back(std::move(s.data));
    write_state_cache(o.cache_out, cache);
    out << "cached " << cache.states.size() << " states to " << o.cache_out << '\n';
    if (!have_image) return kExitOk;
  }

  BinaryImage img;
  if (o.index >= 0) {
    if (static_cast<std::size_t>(o.index) >= split->size()) {
      throw UsageError("--index " + std::to_string(o.index) + " out of range (split has " +
                       std::to_string(split->size()) + " images)");
    }
    img = (*split)[static_cast<std::size_t>(o.index)].image;
  } else {
    img = synthetic_image(o.synthetic, cfg.resolution, cfg.seed);
  }

  const bool any = o.dump_circuit || o.dump_state || o.verify || o.count_gates;
  const Statevector direct = frqi_state_direct(img, cfg.mode);
  const Circuit circuit = frqi_circuit(img, cfg.mode);
  if (o.dump_circuit) out << circuit_to_text(circuit);
  if (o.dump_state || !any) out << state_dump(direct);

  int status = kExitOk;
  if (o.count_gates) {
    const int controls = encoded_pixel_qubits(n, cfg.mode);
    std::size_t flips = 0;
    if (cfg.mode == EncodingMode::Full) {
      flips = img.white_count();
    } else {
      // one multi-controlled rotation per group with a nonzero color angle
      const Statevector::Amplitudes& a = direct.amplitudes();
      for (Eigen::Index g = 0; g < a.size() / 2; ++g) flips += a(2 * g + 1) != 0.0 ? 1 : 0;
    }
    const double per_op = 2.0 * std::pow(3.0, controls) - 1.0;
    out << "one_control_gates=" << count_controlled_gates(circuit) << '\n'
        << "controls=" << controls << '\n'
        << (cfg.mode == EncodingMode::Full ? "white_pixels=" : "rotated_groups=") << flips << '\n'
        << "bound=" << fmt("%.0f", per_op * static_cast<double>(flips)) << '\n'
        << "worst_case_bound=" << fmt("%.0f", std::pow(2.0, controls) * per_op) << '\n';
  }
  if (o.verify) {
    const Statevector simulated = simulate(circuit);
    const Statevector reference =
        cfg.mode == EncodingMode::Full ? direct : group_normalized(direct);
    const double dev = max_deviation(simulated, reference);
    const bool ok = dev <= 1e-8;
    out << "max_deviation=" << fmt("%.3e", dev) << (ok ? " ok" : " FAIL") << '\n';
    if (!ok) status = kExitTolerance;
  }
  return status;
}

struct GradcheckOptions {
  int seeds = 1;
  bool inject_sign_flip = false;
  double h = 1e-5;
};

Statevector random_state(int qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Statevector::Amplitudes a(Eigen::Index{1} << qubits);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = {d(rng), d(rng)};
  a /= a.norm();
  return Statevector(std::move(a));
}

int cmd_gradcheck(const RunConfig& cfg, const GradcheckOptions& o, std::ostream& out) {
  if (o.seeds < 1) throw UsageError("--seeds must be >= 1");
  if (!(o.h > 0.0)) throw UsageError("--fd-step must be positive");
  const ShiftRule rule = o.inject_sign_flip ? ShiftRule{-0.5, std::numbers::pi / 2} : ShiftRule{};
  constexpr double kRel = 1e-5, kAbs = 1e-7, kNearZero = 1e-3;
  std::size_t rows = 0, failures = 0;
  double worst_abs = 0.0, worst_rel = 0.0;
  char line[160];
  std::snprintf(line, sizeof line, "%-5s %-6s %2s %2s %4s %22s %22s %10s %10s %s\n", "sweep",
                "layer", "p", "L", "slot", "shift", "fd", "abs_err", "rel_err", "status");
  out << line;
  for (int s = 0; s < o.seeds; ++s) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> theta(-1.0, 1.0);
    for (LayerType lt : {LayerType::CRADL, LayerType::CRAML}) {
      for (int p = 1; p <= 3; ++p) {
        for (int layers = 1; layers <= 2; ++layers) {
          const QnnModel model(ModelSpec{lt, layers, p, EncodingMode::Full});
          const Statevector data = random_state(p + 1, rng);
          ParamVector params(static_cast<std::size_t>(model.num_params()));
          for (auto& t : params) t = theta(rng);
          const Gradient shift = parameter_shift_grad(data, model, params, rule);
          const Gradient fd = finite_difference_grad(data, model, params, o.h);
          for (std::size_t k = 0; k < shift.size(); ++k) {
            const double abs_err = std::abs(shift[k] - fd[k]);
            const double rel_err = fd[k] != 0.0 ? abs_err / std::abs(fd[k]) : 0.0;
            // absolute tolerance only where the gradient itself is near zero
            const bool near_zero = std::abs(fd[k]) < kNearZero;
            const bool ok = near_zero ? abs_err <= kAbs : rel_err <= kRel;
            worst_abs = std::max(worst_abs, abs_err);
            if (!near_zero) worst_rel = std::max(worst_rel, rel_err);
            ++rows;
            failures += ok ? 0 : 1;
            std::snprintf(line, sizeof line, "%-5d %-6s %2d %2d %4zu %22.15e %22.15e %10.3e %10.3e %s\n",
                          s, std::string(layer_name(lt)).c_str(), p, layers, k, shift[k], fd[k],
                          abs_err, rel_err, ok ? "ok" : "FAIL");
            out << line;
          }
        }
      }
    }
  }
  out << "gradcheck: " << rows << " rows, " << failures << " failures, max_abs_err "
      << fmt("%.3e", worst_abs) << ", max_rel_err " << fmt("%.3e", worst_rel) << '\n';
  return failures == 0 ? kExitOk : kExitTolerance;
}

int cmd_datainfo(const RunConfig& cfg, bool write_manifests, std::ostream& out) {
  validate(cfg);
  const Splits s = load_splits(cfg);
  out << "data_dir=" << cfg.data_dir.string() << '\n' << "resolution=" << cfg.resolution << '\n'
      << dataset_summary(s);
  auto balance = [](const std::vector<LabeledImage>& v) {
    return static_cast<double>(count_label(v, 1)) / static_cast<double>(v.size());
  };
  auto mean_white = [](const std::vector<LabeledImage>& v) {
    double w = 0.0;
    for (const auto& li : v) w += static_cast<double>(li.image.white_count());
    return w / static_cast<double>(v.size());
  };
  out << "train_positive_fraction=" << fmt("%.4f", balance(s.train)) << '\n'
      << "val_positive_fraction=" << fmt("%.4f", balance(s.val)) << '\n'
      << "train_mean_white_pixels=" << fmt("%.3f", mean_white(s.train)) << '\n'
      << data_hashes(cfg);
  if (write_manifests) {
    ensure_dir(cfg.out_dir);
    write_text(cfg.out_dir / "train_split.csv", split_manifest_csv(s.train));
    write_text(cfg.out_dir / "val_split.csv", split_manifest_csv(s.val));
    out << "wrote split manifests to " << cfg.out_dir.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FRQI image classifiers with parameterized quantum circuits"};
  app.name("frqinet");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto* train = app.add_subcommand("train", "train a quantum or baseline model");
  add_common_options(train, cfg, config_path);

  std::string model_path, eval_split = "val";
  auto* eval = app.add_subcommand("eval", "evaluate a saved model");
  add_common_options(eval, cfg, config_path);
  eval->add_option("--model", model_path, "model.txt written by train")->required();
  eval->add_option("--split", eval_split, "train | val");

  EncodeOptions enc;
  auto* encode = app.add_subcommand("encode", "encode one image and inspect the FRQI circuit");
  add_common_options(encode, cfg, config_path);
  encode->add_option("--index", enc.index, "image index within --split");
  encode->add_option("--split", enc.split, "train | val");
  encode->add_option("--synthetic", enc.synthetic, "black | white | checker | random");
  encode->add_flag("--dump-circuit", enc.dump_circuit, "print the encoding circuit");
  encode->add_flag("--dump-state", enc.dump_state, "print the encoded statevector");
  encode->add_flag("--verify", enc.verify, "compare circuit simulation with direct construction");
  encode->add_flag("--count-gates", enc.count_gates, "count one-control gates against the bound");
  encode->add_option("--cache-out", enc.cache_out, "write the whole split as a state cache");

  GradcheckOptions gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "parameter-shift vs finite differences");
  add_common_options(gradcheck, cfg, config_path);
  gradcheck->add_option("--seeds", gc.seeds, "independent sweeps");
  gradcheck->add_option("--fd-step", gc.h, "finite-difference step");
  gradcheck->add_flag("--inject-sign-flip", gc.inject_sign_flip, "negate the shift (negative control)");

  bool write_manifests = false;
  auto* datainfo = app.add_subcommand("datainfo", "dataset counts, balance and hashes");
  add_common_options(datainfo, cfg, config_path);
  datainfo->add_flag("--write-manifests", write_manifests, "write split CSVs to --out");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    CLI::App* sub = app.get_subcommands().front();
    finish_config(sub, cfg, config_path);
    if (sub == train) return cmd_train(cfg, out);
    if (sub == eval) return cmd_eval(cfg, model_path, eval_split, out);
    if (sub == encode) return cmd_encode(cfg, enc, out);
    if (sub == gradcheck) return cmd_gradcheck(cfg, gc, out);
    return cmd_datainfo(cfg, write_manifests, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "frqinet: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "frqinet: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "frqinet: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace frqinet::cli
