#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "klmsim/circuit.hpp"

namespace klmsim {

/// First-quantized wavefunction: n distinguishable particles, each carrying
/// an m-dimensional mode space, stored as a dense m^n tensor (particle 0 is
/// the slowest index). Detected particles stay in the tensor with their
/// index frozen at the detected mode; `alive` marks the rest. The tensor
/// restricted to alive particles stays symmetric under particle exchange.
struct FirstQState {
    std::size_t particle_count = 0;
    std::size_t mode_count = 1;
    std::vector<Complex> amplitudes;
    std::vector<bool> alive;
    std::vector<int> detected_mode;  // -1 while alive

    std::size_t tensor_size() const;
    std::size_t stride(std::size_t particle) const;
    std::size_t alive_particles() const;
    double norm() const;
};

/// Modes assigned to the particles of a product state before symmetrization;
/// repeats are allowed.
using SymmetrizedAssignment = std::vector<ModeIndex>;

/// Normalized total symmetrization of |modes[0]> x ... x |modes[n-1]>, with
/// the multiplicity-aware constant 1/sqrt(n! * prod_j n_j!).
FirstQState permanent_state(const SymmetrizedAssignment& modes, std::size_t mode_count);

/// Applies U to every alive particle's index; dead indices are untouched.
FirstQState evolve(const FirstQState& state, const ModeUnitary& u);

struct FirstQDetectionBranch {
    int count = 0;
    double probability = 0.0;
    FirstQState state;
};

/// Photon-number detection of one mode: branches over the number k of alive
/// particles found there. The post-branch state projects the k detected
/// particles onto the mode, renormalizes and marks them dead; which-particle
/// labels are marginalized by always detecting the lowest-indexed alive
/// particles (any choice gives the same state by exchange symmetry).
std::vector<FirstQDetectionBranch> detect_mode(const FirstQState& state, ModeIndex mode);

/// If triggered, multiplies each tensor entry by e^{i phase} once per alive
/// particle occupying the mode. Dead particles are skipped: their photon was
/// already absorbed.
FirstQState conditional_phase_all(const FirstQState& state, const ConditionalPhaseShifter& element,
                                  const DetectorRecord& record);

/// Max-entry change under the worst transposition of two alive particles.
double symmetry_defect(const FirstQState& state);

struct FirstQLeaf {
    DetectorRecord record;
    double probability = 0.0;
    FirstQState state;
};

/// Test fixture: flip_phase_sign negates every phase-shifter angle (plain,
/// conditional and beamsplitter phi) seen by this engine, deliberately
/// desynchronizing it from the Fock engine.
enum class EngineMutation { none, flip_phase_sign };

struct FirstQRunResult {
    std::vector<FirstQLeaf> leaves;
    // max alive-subspace transposition defect observed after any operation
    // on any branch of the run
    double max_symmetry_defect = 0.0;
};

FirstQRunResult run_firstq_exhaustive(const Circuit& circuit,
                                      EngineMutation mutation = EngineMutation::none);

std::map<DetectorRecord, long> run_firstq_sampled(const Circuit& circuit, std::uint64_t seed,
                                                  long shots);

}  // namespace klmsim
