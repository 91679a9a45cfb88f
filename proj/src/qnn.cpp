#include "frqinet/qnn.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace frqinet {

std::string_view layer_name(LayerType t) { return t == LayerType::CRADL ? "cradl" : "craml"; }

LayerType parse_layer(std::string_view name) {
  if (name == "cradl") return LayerType::CRADL;
  if (name == "craml") return LayerType::CRAML;
  throw std::invalid_argument("unknown layer type: " + std::string(name));
}

namespace {
void check_layer_args(int p, int base_slot) {
  if (p < 1) throw std::invalid_argument("layer: needs at least one pixel qubit");
  if (base_slot < 0) throw std::invalid_argument("layer: negative base slot");
}
}  // namespace

Circuit build_layer_cradl(int p, int base_slot) {
  check_layer_args(p, base_slot);
  const int color = p, readout = p + 1;
  Circuit c(p + 2, base_slot + 2 * p);
  for (int i = 0; i < p; ++i) {
    c.append(gates::exp_xx(i, readout, base_slot + i));
    c.append(gates::exp_xx(i, color, base_slot + i));
  }
  for (int i = 0; i < p; ++i) {
    c.append(gates::exp_zz(i, readout, base_slot + p + i));
    c.append(gates::exp_zz(i, color, base_slot + p + i));
  }
  return c;
}

Circuit build_layer_craml(int p, int base_slot) {
  check_layer_args(p, base_slot);
  const int color = p, readout = p + 1;
  Circuit c(p + 2, base_slot + 2 * p);
  for (int i = 0; i < p; ++i) {
    const int s = base_slot + 2 * i;
    c.append(gates::exp_xx(i, readout, s));
    c.append(gates::exp_xx(i, color, s));
    c.append(gates::exp_zz(i, readout, s + 1));
    c.append(gates::exp_zz(i, color, s + 1));
  }
  return c;
}

QnnModel::QnnModel(ModelSpec spec) : spec_(spec), circuit_(spec.num_qubits()) {
  if (spec.num_layers < 0) throw std::invalid_argument("model: negative layer count");
  if (spec.num_pixel_qubits < 1) throw std::invalid_argument("model: needs pixel qubits");
  const int p = spec.num_pixel_qubits;
  for (int l = 0; l < spec.num_layers; ++l) {
    const int base = 2 * p * l;
    circuit_.append(spec.layer_type == LayerType::CRADL ? build_layer_cradl(p, base)
                                                        : build_layer_craml(p, base));
  }
  circuit_.reserve_slots(spec.num_params());
}

Statevector prepare_input(const Statevector& data_state, const QnnModel& model) {
  if (data_state.num_qubits() != model.spec().num_pixel_qubits + 1) {
    throw std::invalid_argument("forward: data state does not match the model's pixel qubits");
  }
  return append_plus_qubit(data_state);
}

double forward_prepared(const Statevector& input, const QnnModel& model,
                        std::span<const double> params) {
  if (params.size() != static_cast<std::size_t>(model.num_params())) {
    throw std::invalid_argument("forward: parameter count mismatch");
  }
  Statevector s = input;
  simulate_inplace(model.circuit(), s, params);
  return expectation_z(s, model.spec().readout_qubit());
}

double forward(const Statevector& data_state, const QnnModel& model, std::span<const double> params) {
  return forward_prepared(prepare_input(data_state, model), model, params);
}

int predict(double expectation) { return expectation >= 0.0 ? 1 : -1; }

ParamVector init_params(const ModelSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  ParamVector p(static_cast<std::size_t>(spec.num_params()));
  for (auto& v : p) v = dist(rng);
  return p;
}

std::string model_to_text(const SavedModel& m) {
  std::ostringstream os;
  os << "layer_type=" << layer_name(m.spec.layer_type) << '\n'
     << "layers=" << m.spec.num_layers << '\n'
     << "pixel_qubits=" << m.spec.num_pixel_qubits << '\n'
     << "mode=" << mode_name(m.spec.mode) << '\n'
     << "seed=" << m.seed << '\n'
     << "params=";
  char buf[40];
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", m.params[i]);
    os << (i ? " " : "") << buf;
  }
  os << '\n';
  return os.str();
}

SavedModel model_from_text(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("model file: malformed line");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto field = [&](const char* k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw std::invalid_argument(std::string("model file: missing ") + k);
    return it->second;
  };
  SavedModel m;
  m.spec.layer_type = parse_layer(field("layer_type"));
  m.spec.num_layers = std::stoi(field("layers"));
  m.spec.num_pixel_qubits = std::stoi(field("pixel_qubits"));
  m.spec.mode = parse_mode(field("mode"));
  m.seed = std::stoull(field("seed"));
  std::istringstream ps(field("params"));
  for (double v; ps >> v;) m.params.push_back(v);
  if (m.params.size() != static_cast<std::size_t>(m.spec.num_params())) {
    throw std::invalid_argument("model file: parameter count does not match the spec");
  }
  return m;
}

void save_model(const std::filesystem::path& path, const SavedModel& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << model_to_text(m);
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return model_from_text(ss.str());
}

}  // namespace frqinet
