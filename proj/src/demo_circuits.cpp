#include "klmsim/demo_circuits.hpp"

#include <cmath>

namespace klmsim {

Circuit hom_circuit() {
    Circuit circuit;
    circuit.mode_count = 2;
    circuit.input_modes = {0, 1};
    circuit.elements = {
        Beamsplitter{0, 1, M_PI / 4.0, 0.0},
        Detector{0, "D1"},
        Detector{1, "D2"},
    };
    return circuit;
}

const char* const kFeedforwardShowcaseJson = R"json({
  "modes": 3,
  "input_modes": [0, 1, 2],
  "elements": [
    {"type": "bs", "a": 0, "b": 1, "theta": 0.7853981633974483, "phi": 0.0},
    {"type": "bs", "a": 1, "b": 2, "theta": 0.5235987755982988, "phi": 0.9},
    {"type": "det", "mode": 2, "id": "D"},
    {"type": "cps", "mode": 0, "phase": 1.0471975511965976, "controller": "D", "trigger": {"op": ">=", "k": 1}},
    {"type": "cps", "mode": 1, "phase": 1.0471975511965976, "controller": "D", "trigger": {"op": ">=", "k": 1}},
    {"type": "bs", "a": 0, "b": 1, "theta": 0.6283185307179586, "phi": 0.3},
    {"type": "bs", "a": 1, "b": 2, "theta": 0.7853981633974483, "phi": 0.0},
    {"type": "det", "mode": 0, "id": "D1"},
    {"type": "det", "mode": 1, "id": "D2"},
    {"type": "det", "mode": 2, "id": "D3"}
  ]
})json";

Circuit feedforward_showcase_circuit() {
    return circuit_from_json_text(kFeedforwardShowcaseJson);
}

}  // namespace klmsim
