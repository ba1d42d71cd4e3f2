#pragma once

#include "klmsim/circuit.hpp"

namespace klmsim {

/// Two photons meeting on a 50/50 beamsplitter with a detector per output.
Circuit hom_circuit();

/// Fixed feed-forward showcase: a three-mode beamsplitter mesh with one
/// mid-circuit detector driving conditional phase shifters on the other two
/// modes, followed by detectors on every mode. The same JSON is committed at
/// data/fig3_circuit.json so results stay stable across versions.
extern const char* const kFeedforwardShowcaseJson;
Circuit feedforward_showcase_circuit();

}  // namespace klmsim
