#include "klmsim/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace klmsim {

namespace {

int total_photons(const FockBasisState& occ) {
    return std::accumulate(occ.begin(), occ.end(), 0);
}

// occupation (2,0,1) -> assignment [0,0,2]
SymmetrizedAssignment occupation_to_assignment(const FockBasisState& occ) {
    SymmetrizedAssignment modes;
    for (std::size_t j = 0; j < occ.size(); ++j) {
        for (int r = 0; r < occ[j]; ++r) {
            modes.push_back(j);
        }
    }
    return modes;
}

}  // namespace

FirstQState fock_to_fq(const FockVector& state) {
    if (state.mode_count < 1) {
        throw std::invalid_argument("fock_to_fq: state has no modes");
    }
    int photons = 0;
    for (const auto& [occ, amp] : state.amplitudes) {
        photons = total_photons(occ);
        break;
    }

    FirstQState out;
    out.particle_count = static_cast<std::size_t>(photons);
    out.mode_count = state.mode_count;
    out.alive.assign(out.particle_count, true);
    out.detected_mode.assign(out.particle_count, -1);
    out.amplitudes.assign(out.tensor_size(), Complex(0.0, 0.0));
    if (photons == 0) {
        // scalar edge: keep the vacuum amplitude (norm 1, possibly a phase)
        const FockBasisState vacuum(state.mode_count, 0);
        const auto it = state.amplitudes.find(vacuum);
        out.amplitudes[0] = it == state.amplitudes.end() ? Complex(0.0, 0.0) : it->second;
        return out;
    }

    for (const auto& [occ, amp] : state.amplitudes) {
        if (total_photons(occ) != photons) {
            throw std::invalid_argument("fock_to_fq: mixed photon-number sectors");
        }
        const FirstQState basis = permanent_state(occupation_to_assignment(occ), state.mode_count);
        for (std::size_t flat = 0; flat < basis.amplitudes.size(); ++flat) {
            out.amplitudes[flat] += amp * basis.amplitudes[flat];
        }
    }
    return out;
}

FockVector fq_to_fock(const FirstQState& state) {
    const double defect = symmetry_defect(state);
    if (defect >= kBosonicSectorTol) {
        std::ostringstream os;
        os << "fq_to_fock: not in bosonic sector (symmetry defect " << defect << ")";
        throw std::invalid_argument(os.str());
    }
    const std::size_t m = state.mode_count;
    std::vector<std::size_t> alive;
    std::size_t frozen_base = 0;
    for (std::size_t p = 0; p < state.particle_count; ++p) {
        if (state.alive[p]) {
            alive.push_back(p);
        } else {
            frozen_base += static_cast<std::size_t>(state.detected_mode[p]) * state.stride(p);
        }
    }
    const std::size_t a = alive.size();

    FockVector out;
    out.mode_count = m;
    if (a == 0) {
        out.amplitudes[FockBasisState(m, 0)] = state.amplitudes[frozen_base];
        out.prune();
        return out;
    }

    // project the alive-particle slice onto each occupation's symmetric
    // basis tensor: <e_occ, chi> = sqrt(prod occ_j! / a!) * sum over
    // arrangements of chi
    std::size_t slice_size = 1;
    for (std::size_t i = 0; i < a; ++i) {
        slice_size *= m;
    }
    std::map<FockBasisState, Complex> sums;
    std::vector<std::size_t> digits(a);
    for (std::size_t t = 0; t < slice_size; ++t) {
        std::size_t rest = t;
        for (std::size_t i = a; i-- > 0;) {
            digits[i] = rest % m;
            rest /= m;
        }
        std::size_t flat = frozen_base;
        for (std::size_t i = 0; i < a; ++i) {
            flat += digits[i] * state.stride(alive[i]);
        }
        const Complex amp = state.amplitudes[flat];
        if (amp == Complex(0.0, 0.0)) {
            continue;
        }
        FockBasisState occ(m, 0);
        for (std::size_t i = 0; i < a; ++i) {
            ++occ[digits[i]];
        }
        sums[occ] += amp;
    }
    const double a_fact = factorial(static_cast<int>(a));
    for (const auto& [occ, total] : sums) {
        double occ_fact = 1.0;
        for (int n : occ) {
            occ_fact *= factorial(n);
        }
        out.amplitudes[occ] = total * std::sqrt(occ_fact / a_fact);
    }
    out.prune();
    return out;
}

Complex transition_amplitude_oracle(const ModeUnitary& u, const FockBasisState& in_occ,
                                    const FockBasisState& out_occ) {
    if (in_occ.size() != u.dim() || out_occ.size() != u.dim()) {
        throw std::invalid_argument("transition_amplitude_oracle: occupation length mismatch");
    }
    if (total_photons(in_occ) != total_photons(out_occ)) {
        throw std::invalid_argument("transition_amplitude_oracle: photon-number mismatch");
    }
    const SymmetrizedAssignment cols = occupation_to_assignment(in_occ);
    const SymmetrizedAssignment rows = occupation_to_assignment(out_occ);
    const std::size_t n = cols.size();

    ComplexMatrix sub(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                u.matrix()(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
        }
    }
    double norm_const = 1.0;
    for (int x : in_occ) {
        norm_const *= factorial(x);
    }
    for (int x : out_occ) {
        norm_const *= factorial(x);
    }
    return permanent_ryser(sub) / std::sqrt(norm_const);
}

double phase_aligned_distance(const FockVector& a, const FockVector& b) {
    Complex overlap(0.0, 0.0);
    for (const auto& [occ, amp] : a.amplitudes) {
        const auto it = b.amplitudes.find(occ);
        if (it != b.amplitudes.end()) {
            overlap += std::conj(amp) * it->second;
        }
    }
    // rotate b onto a and take the entrywise difference; unlike the
    // norm/overlap identity this does not cancel catastrophically when the
    // states agree to machine precision
    const Complex rotation =
        std::abs(overlap) == 0.0 ? Complex(1.0, 0.0) : std::conj(overlap) / std::abs(overlap);
    double sum = 0.0;
    for (const auto& [occ, amp] : a.amplitudes) {
        const auto it = b.amplitudes.find(occ);
        const Complex other = it == b.amplitudes.end() ? Complex(0.0, 0.0) : it->second;
        sum += std::norm(amp - rotation * other);
    }
    for (const auto& [occ, amp] : b.amplitudes) {
        if (a.amplitudes.find(occ) == a.amplitudes.end()) {
            sum += std::norm(amp);
        }
    }
    return std::sqrt(sum);
}

double total_variation_distance(const std::map<DetectorRecord, double>& a,
                                const std::map<DetectorRecord, double>& b) {
    double sum = 0.0;
    for (const auto& [record, p] : a) {
        const auto it = b.find(record);
        sum += std::abs(p - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [record, p] : b) {
        if (a.find(record) == a.end()) {
            sum += p;
        }
    }
    return 0.5 * sum;
}

Circuit random_circuit(std::mt19937_64& rng, std::size_t max_modes, std::size_t max_photons,
                       int max_detectors) {
    if (max_modes < 2) {
        throw std::invalid_argument("random_circuit: need at least 2 modes for beamsplitters");
    }
    if (max_photons < 1) {
        throw std::invalid_argument("random_circuit: need at least 1 photon");
    }
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    auto uniform_int = [&rng](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };

    Circuit circuit;
    circuit.mode_count = uniform_int(2, max_modes);
    const std::size_t m = circuit.mode_count;
    const std::size_t photons = uniform_int(1, std::min(max_photons, m));

    std::vector<ModeIndex> all_modes(m);
    std::iota(all_modes.begin(), all_modes.end(), 0);
    if (uniform_int(0, 3) == 0) {
        // occasional multi-photon inputs on one mode
        for (std::size_t i = 0; i < photons; ++i) {
            circuit.input_modes.push_back(uniform_int(0, m - 1));
        }
    } else {
        std::shuffle(all_modes.begin(), all_modes.end(), rng);
        circuit.input_modes.assign(all_modes.begin(),
                                   all_modes.begin() + static_cast<std::ptrdiff_t>(photons));
    }
    std::sort(circuit.input_modes.begin(), circuit.input_modes.end());

    const std::size_t detectors =
        uniform_int(0, static_cast<std::size_t>(std::max(0, max_detectors)));
    std::shuffle(all_modes.begin(), all_modes.end(), rng);
    std::vector<ModeIndex> detector_modes(all_modes.begin(),
                                          all_modes.begin() +
                                              static_cast<std::ptrdiff_t>(std::min(detectors, m)));

    auto random_unitary_element = [&]() -> Element {
        if (uniform_int(0, 1) == 0) {
            const ModeIndex a = uniform_int(0, m - 1);
            ModeIndex b = uniform_int(0, m - 2);
            if (b >= a) {
                ++b;
            }
            return Beamsplitter{a, b, angle(rng), angle(rng)};
        }
        return PhaseShifter{uniform_int(0, m - 1), angle(rng)};
    };

    std::vector<std::vector<Element>> segments(detector_modes.size() + 1);
    for (auto& segment : segments) {
        const std::size_t count = uniform_int(1, 4);
        for (std::size_t i = 0; i < count; ++i) {
            segment.push_back(random_unitary_element());
        }
    }

    static const Trigger kTriggers[] = {{Trigger::Op::Equal, 0},
                                        {Trigger::Op::Equal, 1},
                                        {Trigger::Op::AtLeast, 1}};
    for (std::size_t d = 0; d < detector_modes.size(); ++d) {
        const std::size_t feedforward = uniform_int(0, 2);
        for (std::size_t f = 0; f < feedforward; ++f) {
            const std::size_t target = uniform_int(d + 1, detector_modes.size());
            ConditionalPhaseShifter cps{uniform_int(0, m - 1), angle(rng),
                                        "D" + std::to_string(d + 1),
                                        kTriggers[uniform_int(0, 2)]};
            auto& segment = segments[target];
            const std::size_t pos = uniform_int(0, segment.size());
            segment.insert(segment.begin() + static_cast<std::ptrdiff_t>(pos), cps);
        }
    }

    for (std::size_t s = 0; s < segments.size(); ++s) {
        for (Element& element : segments[s]) {
            circuit.elements.push_back(std::move(element));
        }
        if (s < detector_modes.size()) {
            circuit.elements.push_back(Detector{detector_modes[s], "D" + std::to_string(s + 1)});
        }
    }
    return circuit;
}

EquivalenceReport run_equivalence_suite(const SuiteConfig& config) {
    EquivalenceReport report;
    for (int trial = 0; trial < config.trials; ++trial) {
        std::mt19937_64 rng(config.seed +
                            0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1));
        const Circuit circuit = random_circuit(rng, config.max_modes, config.max_photons,
                                               config.max_detectors);

        const std::vector<BranchOutcome> fock_leaves = run_fock_exhaustive(circuit);
        const FirstQRunResult firstq = run_firstq_exhaustive(circuit, config.mutation);
        report.max_symmetry_defect =
            std::max(report.max_symmetry_defect, firstq.max_symmetry_defect);

        std::map<DetectorRecord, double> fock_dist;
        std::map<DetectorRecord, const BranchOutcome*> fock_by_record;
        for (const BranchOutcome& leaf : fock_leaves) {
            fock_dist[leaf.record] = leaf.probability;
            fock_by_record[leaf.record] = &leaf;
        }
        std::map<DetectorRecord, double> firstq_dist;
        for (const FirstQLeaf& leaf : firstq.leaves) {
            firstq_dist[leaf.record] = leaf.probability;
        }

        const double tv = total_variation_distance(fock_dist, firstq_dist);
        report.max_distribution_distance = std::max(report.max_distribution_distance, tv);
        if (tv >= kEquivalenceTol) {
            report.failures.push_back({trial, circuit, {}, "distribution", tv});
        }

        for (const FirstQLeaf& leaf : firstq.leaves) {
            const auto it = fock_by_record.find(leaf.record);
            if (it == fock_by_record.end()) {
                continue;  // distribution mismatch already accounted in tv
            }
            const FockVector mapped = fq_to_fock(leaf.state);
            const double dist = phase_aligned_distance(it->second->state, mapped);
            report.max_state_distance = std::max(report.max_state_distance, dist);
            if (dist >= kEquivalenceTol) {
                report.failures.push_back({trial, circuit, leaf.record, "state", dist});
            }
        }
        ++report.circuits_tested;
    }
    return report;
}

}  // namespace klmsim
