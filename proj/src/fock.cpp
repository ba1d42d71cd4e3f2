#include "klmsim/fock.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace klmsim {

namespace {

double occupation_factorial(const FockBasisState& occ) {
    double out = 1.0;
    for (int n : occ) {
        out *= factorial(n);
    }
    return out;
}

std::string join_violations(const ValidationReport& report) {
    std::ostringstream os;
    for (std::size_t i = 0; i < report.violations.size(); ++i) {
        os << (i == 0 ? "" : "; ") << report.violations[i];
    }
    return os.str();
}

// Applies a stage's detector-free elements: maximal beamsplitter/phase runs
// are compiled to one mode unitary, conditional phase shifters are resolved
// against the record as they appear.
FockVector apply_stage_elements(FockVector state, std::span<const Element> elements,
                                const DetectorRecord& record, std::size_t mode_count) {
    std::vector<Element> pending;
    auto flush = [&]() {
        if (!pending.empty()) {
            state = apply_unitary(state, compile_segment(pending, mode_count));
            pending.clear();
        }
    };
    for (const Element& element : elements) {
        if (const auto* cps = std::get_if<ConditionalPhaseShifter>(&element)) {
            flush();
            state = apply_conditional_phase(state, *cps, record);
        } else {
            pending.push_back(element);
        }
    }
    flush();
    return state;
}

void require_valid(const Circuit& circuit) {
    const ValidationReport report = validate(circuit);
    if (!report.ok()) {
        throw std::invalid_argument("run: invalid circuit: " + join_violations(report));
    }
}

}  // namespace

double FockVector::norm() const {
    double sum = 0.0;
    for (const auto& [occ, amp] : amplitudes) {
        sum += std::norm(amp);
    }
    return std::sqrt(sum);
}

void FockVector::prune(double eps) {
    for (auto it = amplitudes.begin(); it != amplitudes.end();) {
        if (std::abs(it->second) < eps) {
            it = amplitudes.erase(it);
        } else {
            ++it;
        }
    }
}

FockVector input_state(const Circuit& circuit) {
    FockVector state;
    state.mode_count = circuit.mode_count;
    FockBasisState occ(circuit.mode_count, 0);
    for (ModeIndex mode : circuit.input_modes) {
        if (mode >= circuit.mode_count) {
            throw std::invalid_argument("input_state: input mode out of range");
        }
        ++occ[mode];
    }
    state.amplitudes[occ] = Complex(1.0, 0.0);
    return state;
}

FockVector apply_unitary(const FockVector& state, const ModeUnitary& u) {
    if (u.dim() != state.mode_count) {
        throw std::invalid_argument("apply_unitary: dimension mismatch");
    }
    const Eigen::MatrixXcd& mat = u.matrix();
    const std::size_t m = state.mode_count;

    FockVector out;
    out.mode_count = m;
    for (const auto& [occ, amp] : state.amplitudes) {
        // expand prod_j (sum_k U(k,j) out_k^dag)^{n_j} applied to vacuum
        std::map<FockBasisState, Complex> poly;
        poly[FockBasisState(m, 0)] = amp / std::sqrt(occupation_factorial(occ));
        for (std::size_t j = 0; j < m; ++j) {
            for (int rep = 0; rep < occ[j]; ++rep) {
                std::map<FockBasisState, Complex> next;
                for (const auto& [mono, coeff] : poly) {
                    for (std::size_t k = 0; k < m; ++k) {
                        const Complex ukj = mat(static_cast<Eigen::Index>(k),
                                                static_cast<Eigen::Index>(j));
                        if (ukj == Complex(0.0, 0.0)) {
                            continue;
                        }
                        FockBasisState grown = mono;
                        ++grown[k];
                        next[grown] += coeff * ukj;
                    }
                }
                poly = std::move(next);
            }
        }
        for (const auto& [mono, coeff] : poly) {
            out.amplitudes[mono] += coeff * std::sqrt(occupation_factorial(mono));
        }
    }
    out.prune();
    return out;
}

std::vector<FockDetectionBranch> detect(const FockVector& state, ModeIndex mode) {
    if (mode >= state.mode_count) {
        throw std::invalid_argument("detect: mode out of range");
    }
    std::map<int, double> count_probability;
    for (const auto& [occ, amp] : state.amplitudes) {
        count_probability[occ[mode]] += std::norm(amp);
    }

    std::vector<FockDetectionBranch> branches;
    for (const auto& [count, probability] : count_probability) {
        if (probability < kBranchEps) {
            continue;
        }
        FockDetectionBranch branch;
        branch.count = count;
        branch.probability = probability;
        branch.state.mode_count = state.mode_count;
        const double scale = 1.0 / std::sqrt(probability);
        for (const auto& [occ, amp] : state.amplitudes) {
            if (occ[mode] != count) {
                continue;
            }
            FockBasisState cleared = occ;
            cleared[mode] = 0;  // photons absorbed by the detector
            branch.state.amplitudes[cleared] = amp * scale;
        }
        branch.state.prune();
        branches.push_back(std::move(branch));
    }
    return branches;
}

FockVector apply_conditional_phase(const FockVector& state, const ConditionalPhaseShifter& element,
                                   const DetectorRecord& record) {
    const auto it = record.find(element.controller);
    if (it == record.end()) {
        throw std::invalid_argument("apply_conditional_phase: missing controller record '" +
                                    element.controller + "'");
    }
    if (!element.trigger.matches(it->second)) {
        return state;
    }
    FockVector out;
    out.mode_count = state.mode_count;
    for (const auto& [occ, amp] : state.amplitudes) {
        out.amplitudes[occ] = amp * std::polar(1.0, element.phase * occ[element.mode]);
    }
    return out;
}

std::vector<BranchOutcome> run_fock_exhaustive(const Circuit& circuit) {
    require_valid(circuit);
    const std::vector<Stage> stages = split_at_detectors(circuit);

    struct Frame {
        FockVector state;
        DetectorRecord record;
        double probability;
        std::size_t stage;
    };
    std::vector<Frame> pending;
    pending.push_back({input_state(circuit), {}, 1.0, 0});

    std::map<DetectorRecord, BranchOutcome> leaves;
    while (!pending.empty()) {
        Frame frame = std::move(pending.back());
        pending.pop_back();
        if (frame.stage == stages.size()) {
            if (frame.probability >= kBranchEps) {
                leaves[frame.record] =
                    BranchOutcome{frame.record, frame.probability, std::move(frame.state)};
            }
            continue;
        }
        const Stage& stage = stages[frame.stage];
        FockVector state = apply_stage_elements(std::move(frame.state), stage.elements,
                                                frame.record, circuit.mode_count);
        if (!stage.detector) {
            pending.push_back({std::move(state), frame.record, frame.probability, frame.stage + 1});
            continue;
        }
        for (FockDetectionBranch& branch : detect(state, stage.detector->mode)) {
            DetectorRecord record = frame.record;
            record[stage.detector->id] = branch.count;
            pending.push_back({std::move(branch.state), std::move(record),
                               frame.probability * branch.probability, frame.stage + 1});
        }
    }

    std::vector<BranchOutcome> out;
    out.reserve(leaves.size());
    for (auto& [record, leaf] : leaves) {
        out.push_back(std::move(leaf));
    }
    return out;
}

std::map<DetectorRecord, long> run_fock_sampled(const Circuit& circuit, std::uint64_t seed,
                                                long shots) {
    if (shots < 1) {
        throw std::invalid_argument("run_fock_sampled: shots must be >= 1");
    }
    require_valid(circuit);
    const std::vector<Stage> stages = split_at_detectors(circuit);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::map<DetectorRecord, long> counts;
    for (long shot = 0; shot < shots; ++shot) {
        FockVector state = input_state(circuit);
        DetectorRecord record;
        for (const Stage& stage : stages) {
            state = apply_stage_elements(std::move(state), stage.elements, record,
                                         circuit.mode_count);
            if (!stage.detector) {
                continue;
            }
            std::vector<FockDetectionBranch> branches = detect(state, stage.detector->mode);
            const double draw = unit(rng);
            double cumulative = 0.0;
            std::size_t pick = branches.size() - 1;
            for (std::size_t i = 0; i < branches.size(); ++i) {
                cumulative += branches[i].probability;
                if (draw < cumulative) {
                    pick = i;
                    break;
                }
            }
            record[stage.detector->id] = branches[pick].count;
            state = std::move(branches[pick].state);
        }
        ++counts[record];
    }
    return counts;
}

}  // namespace klmsim
