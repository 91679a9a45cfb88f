#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "frqinet/cli.hpp"
#include "frqinet/mnist.hpp"

using namespace frqinet;
using namespace frqinet::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data_dir() {
  if (const char* env = std::getenv("FRQINET_DATA_DIR"); env && *env) return env;
  return FRQINET_TEST_DATA_DIR;
}

bool have_mnist() { return fs::exists(mnist_files(data_dir()).train_images); }

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("frqinet_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--lr", "fast"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--mode", "half"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--batch", "0"}).code, kExitUsage);
  const Result help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("gradcheck"), std::string::npos);
}

TEST(Cli, SixteenByFullNeedsAllowLarge) {
  const Result r = run({"train", "--resolution", "16", "--mode", "full"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--allow-large"), std::string::npos);
  EXPECT_EQ(run({"encode", "--resolution", "16", "--allow-large", "--synthetic", "black", "--verify"}).code,
            kExitOk);
  EXPECT_EQ(run({"encode", "--resolution", "16", "--mode", "minus2q", "--synthetic", "black"}).code,
            kExitOk);
}

TEST(Cli, EncodeSyntheticVerify) {
  const Result r = run({"encode", "--synthetic", "black", "--verify"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("max_deviation="), std::string::npos);
  EXPECT_NE(r.out.find(" ok"), std::string::npos);
  for (const char* mode : {"full", "minus2q"}) {
    for (const char* img : {"white", "checker", "random"}) {
      const Result v = run({"encode", "--mode", mode, "--synthetic", img, "--verify", "--seed", "3"});
      EXPECT_EQ(v.code, kExitOk) << mode << ' ' << img << '\n' << v.out << v.err;
    }
  }
}

TEST(Cli, EncodeDumpsAndCounts) {
  const Result state = run({"encode", "--resolution", "4", "--synthetic", "checker"});
  EXPECT_EQ(state.code, kExitOk);
  EXPECT_EQ(count_lines(state.out), 32u);
  EXPECT_EQ(state.out.substr(0, 6), "00000\t");

  const Result circ = run({"encode", "--resolution", "2", "--synthetic", "white", "--dump-circuit"});
  EXPECT_EQ(circ.out.rfind("qubits=3 slots=0\nH 0\nH 1\n", 0), 0u);

  const Result count = run({"encode", "--resolution", "4", "--synthetic", "checker", "--count-gates"});
  EXPECT_NE(count.out.find("white_pixels=8\n"), std::string::npos);
  EXPECT_NE(count.out.find("controls=4\n"), std::string::npos);
  EXPECT_NE(count.out.find("bound=1288\n"), std::string::npos);  // 8 * (2 * 3^4 - 1)
  EXPECT_NE(count.out.find("one_control_gates=424\n"), std::string::npos);  // 8 * (2 * 3^3 - 1)
}

TEST(Cli, EncodeNeedsAnImage) {
  EXPECT_EQ(run({"encode"}).code, kExitUsage);
  EXPECT_EQ(run({"encode", "--synthetic", "stripes"}).code, kExitUsage);
  EXPECT_EQ(run({"encode", "--synthetic", "black", "--index", "0"}).code, kExitUsage);
}

TEST(Cli, ConfigFilePrecedence) {
  const fs::path cfg = scratch("precedence.cfg");
  {
    std::ofstream os(cfg);
    os << "# resolution from file\nresolution = 4\nmode=full\n";
  }
  const Result from_file = run({"encode", "--config", cfg.string(), "--synthetic", "black"});
  EXPECT_EQ(from_file.code, kExitOk);
  EXPECT_EQ(count_lines(from_file.out), 32u);
  const Result flag_wins =
      run({"encode", "--config", cfg.string(), "--resolution", "2", "--synthetic", "black"});
  EXPECT_EQ(count_lines(flag_wins.out), 8u);

  {
    std::ofstream os(cfg);
    os << "colour=blue\n";
  }
  EXPECT_EQ(run({"encode", "--config", cfg.string(), "--synthetic", "black"}).code, kExitUsage);
  {
    std::ofstream os(cfg);
    os << "just words\n";
  }
  EXPECT_EQ(run({"encode", "--config", cfg.string(), "--synthetic", "black"}).code, kExitUsage);
  EXPECT_EQ(run({"encode", "--config", "/nonexistent.cfg", "--synthetic", "black"}).code, kExitUsage);
  fs::remove(cfg);
}

TEST(Cli, ConfigEchoRoundTrips) {
  RunConfig cfg;
  cfg.resolution = 16;
  cfg.mode = EncodingMode::CompressedMinus2Q;
  cfg.lr = 0.125;
  cfg.baseline = true;
  cfg.grad_method = GradMethod::ParameterShift;
  RunConfig back;
  std::istringstream is(config_echo(cfg));
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    apply_config_value(back, line.substr(0, eq), line.substr(eq + 1));
  }
  EXPECT_EQ(config_echo(back), config_echo(cfg));
  EXPECT_THROW(apply_config_value(back, "nope", "1"), UsageError);
  EXPECT_THROW(apply_config_value(back, "baseline", "maybe"), UsageError);
}

TEST(Cli, GradcheckPassesAndCatchesSignFlip) {
  const Result ok = run({"gradcheck"});
  EXPECT_EQ(ok.code, kExitOk) << ok.out;
  EXPECT_NE(ok.out.find("0 failures"), std::string::npos);
  EXPECT_NE(ok.out.find("slot"), std::string::npos);

  const Result five = run({"gradcheck", "--seeds", "5"});
  EXPECT_EQ(five.code, kExitOk);
  const std::size_t rows_per_seed = count_lines(ok.out) - 2;  // minus header and summary
  EXPECT_EQ(count_lines(five.out), 2 + 5 * rows_per_seed);

  const Result bug = run({"gradcheck", "--inject-sign-flip"});
  EXPECT_EQ(bug.code, kExitTolerance);
  EXPECT_NE(bug.out.find("FAIL"), std::string::npos);
}

TEST(Cli, MissingDataIsDataError) {
  const Result r = run({"train", "--data-dir", "/nonexistent/mnist", "--out", scratch("nodata").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("/nonexistent/mnist"), std::string::npos);
  EXPECT_EQ(run({"datainfo", "--data-dir", "/nonexistent/mnist"}).code, kExitData);
}

TEST(Cli, EnvironmentSuppliesDefaultDataDir) {
  const char* old = std::getenv("FRQINET_DATA_DIR");
  const std::string saved = old ? old : "";
  ::setenv("FRQINET_DATA_DIR", "/nonexistent/from-env", 1);
  const Result r = run({"datainfo"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("/nonexistent/from-env"), std::string::npos);
  if (old) ::setenv("FRQINET_DATA_DIR", saved.c_str(), 1);
  else ::unsetenv("FRQINET_DATA_DIR");
}

TEST(CliData, TrainQuantumWritesArtifacts) {
  if (!have_mnist()) GTEST_SKIP() << "MNIST not found under " << data_dir();
  const fs::path out = scratch("train_q");
  const Result r = run({"train", "--data-dir", data_dir(), "--resolution", "8", "--mode", "full",
                        "--layers", "20", "--epochs", "10", "--seed", "7", "--max-train", "64",
                        "--max-val", "32", "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("240 trainable parameters"), std::string::npos);
  const std::string csv = slurp(out / "metrics.csv");
  EXPECT_EQ(csv.rfind("epoch,train_loss,train_acc,val_acc\n", 0), 0u);
  EXPECT_EQ(count_lines(csv), 11u);
  const std::string manifest = slurp(out / "manifest.txt");
  for (const char* key : {"resolution=8\n", "seed=7\n", "train_count=64\n", "val_count=32\n",
                          "params=240\n", "sha256.train-images-idx3-ubyte=", "wall_seconds="}) {
    EXPECT_NE(manifest.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(count_lines(slurp(out / "train_split.csv")), 65u);

  const Result ev = run({"eval", "--data-dir", data_dir(), "--model", (out / "model.txt").string(),
                         "--max-val", "32"});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  const std::string last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  const std::string val_acc = last.substr(last.rfind(',') + 1, 8);
  EXPECT_NE(ev.out.find("accuracy=" + val_acc), std::string::npos) << ev.out << " vs " << last;
  fs::remove_all(out);
}

TEST(CliData, TrainBaselineTenEpochs) {
  if (!have_mnist()) GTEST_SKIP() << "MNIST not found under " << data_dir();
  const fs::path out = scratch("train_b");
  const Result r = run({"train", "--baseline", "--data-dir", data_dir(), "--resolution", "8",
                        "--epochs", "10", "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("285 trainable parameters"), std::string::npos);
  EXPECT_EQ(count_lines(slurp(out / "metrics.csv")), 11u);
  EXPECT_EQ(slurp(out / "model.txt").rfind("dense_net 64 4 4\n", 0), 0u);
  fs::remove_all(out);
}

TEST(CliData, EncodeTrainImages) {
  if (!have_mnist()) GTEST_SKIP() << "MNIST not found under " << data_dir();
  for (const char* idx : {"0", "1", "500", "12048"}) {
    const Result r = run({"encode", "--data-dir", data_dir(), "--index", idx, "--verify"});
    EXPECT_EQ(r.code, kExitOk) << idx << r.out << r.err;
  }
  const Result oob = run({"encode", "--data-dir", data_dir(), "--index", "12049"});
  EXPECT_EQ(oob.code, kExitUsage);

  const fs::path cache = scratch("cache.bin");
  const Result c = run({"encode", "--data-dir", data_dir(), "--mode", "minus2q", "--split", "val",
                        "--max-val", "10", "--cache-out", cache.string()});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  const StateCache sc = read_state_cache(cache);
  EXPECT_EQ(sc.states.size(), 10u);
  EXPECT_EQ(sc.mode, EncodingMode::CompressedMinus2Q);
  fs::remove(cache);
}

TEST(CliData, DatainfoCountsAndManifests) {
  if (!have_mnist()) GTEST_SKIP() << "MNIST not found under " << data_dir();
  const fs::path out = scratch("datainfo");
  const Result r = run({"datainfo", "--data-dir", data_dir(), "--write-manifests", "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("train_count=12049\n"), std::string::npos);
  EXPECT_NE(r.out.find("val_count=1968\n"), std::string::npos);
  const std::string first = slurp(out / "val_split.csv");
  run({"datainfo", "--data-dir", data_dir(), "--write-manifests", "--out", out.string()});
  EXPECT_EQ(slurp(out / "val_split.csv"), first);
  fs::remove_all(out);
}
