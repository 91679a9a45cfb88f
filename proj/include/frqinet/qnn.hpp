#pragma once

// Parameterized readout model on top of an encoded data state.
//
// Model register: pixel qubits 0..p-1, color qubit p, readout qubit p+1
// (least significant). The readout starts in |+> and the prediction is its
// Z expectation.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "frqinet/circuit.hpp"
#include "frqinet/frqi.hpp"
#include "frqinet/statevector.hpp"

namespace frqinet {

using ParamVector = std::vector<double>;

enum class LayerType { CRADL, CRAML };

std::string_view layer_name(LayerType t);
LayerType parse_layer(std::string_view name);  // "cradl" | "craml"

struct ModelSpec {
  LayerType layer_type = LayerType::CRADL;
  int num_layers = 20;  // double layers
  int num_pixel_qubits = 6;
  EncodingMode mode = EncodingMode::Full;

  int num_params() const { return 2 * num_pixel_qubits * num_layers; }
  int num_qubits() const { return num_pixel_qubits + 2; }
  int color_qubit() const { return num_pixel_qubits; }
  int readout_qubit() const { return num_pixel_qubits + 1; }

  bool operator==(const ModelSpec&) const = default;
};

/// XX sweep over pixel qubits, each (pixel, readout) and (pixel, color)
/// pair sharing one slot, then the same sweep with ZZ. Slots base..base+2p-1.
Circuit build_layer_cradl(int num_pixel_qubits, int base_slot);

/// XX pair then ZZ pair per pixel qubit, two slots per pixel.
Circuit build_layer_craml(int num_pixel_qubits, int base_slot);

/// A built model: the spec plus its layer circuit (without readout prep).
class QnnModel {
 public:
  explicit QnnModel(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const Circuit& circuit() const { return circuit_; }
  int num_params() const { return circuit_.num_param_slots(); }

 private:
  ModelSpec spec_;
  Circuit circuit_;
};

/// Readout appended as |+>; throws on register-size mismatch.
Statevector prepare_input(const Statevector& data_state, const QnnModel& model);

/// <Z> on the readout after all layers.
double forward(const Statevector& data_state, const QnnModel& model, std::span<const double> params);

/// Same, starting from an already prepared input (data (x) |+>).
double forward_prepared(const Statevector& input, const QnnModel& model,
                        std::span<const double> params);

/// Sign of the expectation; 0 maps to +1.
int predict(double expectation);

/// i.i.d. uniform on (-0.05, 0.05), seeded.
ParamVector init_params(const ModelSpec& spec, std::uint64_t seed);

struct SavedModel {
  ModelSpec spec;
  std::uint64_t seed = 0;
  ParamVector params;
};

/// key=value text: layer_type, layers, pixel_qubits, mode, seed, params
/// (space-separated, 17 significant digits).
void save_model(const std::filesystem::path& path, const SavedModel& m);
SavedModel load_model(const std::filesystem::path& path);
std::string model_to_text(const SavedModel& m);
SavedModel model_from_text(std::string_view text);

}  // namespace frqinet
