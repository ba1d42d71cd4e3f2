#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "klmsim/circuit.hpp"
#include "klmsim/fock.hpp"
#include "klmsim/firstq.hpp"
#include "klmsim/permanent.hpp"

namespace klmsim {

/// Maps each occupation basis state to the unit-norm symmetric tensor with
/// n_j particles in mode j and extends linearly. An isometry onto the
/// symmetric sector; all particles of the result are alive.
FirstQState fock_to_fq(const FockVector& state);

/// Left inverse of fock_to_fq, defined on the alive particles only (dead
/// indices are frozen and sliced away). Rejects states whose alive-subspace
/// symmetry defect reaches kBosonicSectorTol.
FockVector fq_to_fock(const FirstQState& state);

/// Independent transition-amplitude cross-check:
/// <out|U_F|in> = Per(U[rows out, cols in]) / sqrt(prod in_i! prod out_j!)
/// with rows/columns repeated per occupation.
Complex transition_amplitude_oracle(const ModeUnitary& u, const FockBasisState& in_occ,
                                    const FockBasisState& out_occ);

/// 2-norm distance minimized over a global phase:
/// sqrt(|a|^2 + |b|^2 - 2 |<a|b>|).
double phase_aligned_distance(const FockVector& a, const FockVector& b);

double total_variation_distance(const std::map<DetectorRecord, double>& a,
                                const std::map<DetectorRecord, double>& b);

/// Random circuit with beamsplitter/phase-shifter meshes, detectors placed
/// on distinct modes, and feed-forward conditional phase shifters wired to
/// earlier detectors. Angles are uniform in [0, 2 pi); triggers are drawn
/// from {==0, ==1, >=1}. Always validates.
Circuit random_circuit(std::mt19937_64& rng, std::size_t max_modes, std::size_t max_photons,
                       int max_detectors);

struct SuiteConfig {
    int trials = 100;
    std::size_t max_modes = 5;
    std::size_t max_photons = 3;
    int max_detectors = 2;
    std::uint64_t seed = 42;
    EngineMutation mutation = EngineMutation::none;  // test fixture
};

struct EquivalenceFailure {
    int trial = 0;
    Circuit circuit;
    DetectorRecord record;  // empty for distribution-level failures
    std::string kind;       // "distribution" or "state"
    double value = 0.0;
};

struct EquivalenceReport {
    int circuits_tested = 0;
    double max_distribution_distance = 0.0;
    double max_state_distance = 0.0;
    double max_symmetry_defect = 0.0;
    std::vector<EquivalenceFailure> failures;

    bool ok() const { return failures.empty(); }
};

/// Runs both engines exhaustively on `trials` random circuits and compares
/// the detector-count distributions (total variation) and every common
/// branch's post-measurement state after fq_to_fock and global-phase
/// alignment. A trial fails when either distance reaches kEquivalenceTol.
EquivalenceReport run_equivalence_suite(const SuiteConfig& config);

}  // namespace klmsim
