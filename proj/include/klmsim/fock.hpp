#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "klmsim/circuit.hpp"

namespace klmsim {

/// Occupation-number basis label, one non-negative entry per mode.
using FockBasisState = std::vector<int>;

/// Second-quantized wavefunction: sparse complex amplitudes over a fixed
/// photon-number sector. Map keys are lexicographically ordered, which makes
/// iteration (and serialization) deterministic.
struct FockVector {
    std::size_t mode_count = 0;
    std::map<FockBasisState, Complex> amplitudes;

    double norm() const;
    void prune(double eps = kAmplitudeEps);
};

/// One outcome of detecting a single mode: photon count, its probability and
/// the renormalized post-measurement state with the detected photons removed.
struct FockDetectionBranch {
    int count = 0;
    double probability = 0.0;
    FockVector state;
};

/// One leaf of the full measurement tree.
struct BranchOutcome {
    DetectorRecord record;
    double probability = 0.0;
    FockVector state;
};

/// Basis state with one photon per input_modes entry (occupation equals
/// multiplicity when a mode repeats), amplitude 1.
FockVector input_state(const Circuit& circuit);

/// Lifts the mode unitary to Fock space via the creation-operator
/// substitution in_j -> sum_k U(k,j) out_k, with bosonic sqrt(n!) factors.
/// Preserves total photon number and norm.
FockVector apply_unitary(const FockVector& state, const ModeUnitary& u);

/// Photon-number measurement of one mode. Branch probabilities sum to 1;
/// branches below kBranchEps are dropped. Detected photons are absorbed:
/// the measured mode's occupation is zeroed and the photon budget shrinks.
std::vector<FockDetectionBranch> detect(const FockVector& state, ModeIndex mode);

/// If the trigger fires on the recorded count, multiplies each basis
/// amplitude by e^{i phase * n_mode}; otherwise identity.
FockVector apply_conditional_phase(const FockVector& state, const ConditionalPhaseShifter& element,
                                   const DetectorRecord& record);

/// Full branch tree flattened to leaves, sorted by detector record.
/// Leaf probabilities sum to 1 within kNormTol.
std::vector<BranchOutcome> run_fock_exhaustive(const Circuit& circuit);

/// Draws measurement branches proportionally with a seeded deterministic
/// generator; returns empirical counts per detector record.
std::map<DetectorRecord, long> run_fock_sampled(const Circuit& circuit, std::uint64_t seed,
                                                long shots);

}  // namespace klmsim
