#include "klmsim/firstq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace klmsim {

namespace {

constexpr std::size_t kMaxTensorSize = std::size_t{1} << 26;

std::size_t checked_tensor_size(std::size_t particle_count, std::size_t mode_count) {
    std::size_t size = 1;
    for (std::size_t p = 0; p < particle_count; ++p) {
        if (size > kMaxTensorSize / mode_count) {
            throw std::invalid_argument("first-quantized tensor too large for dense storage");
        }
        size *= mode_count;
    }
    return size;
}

void decompose(std::size_t flat, std::size_t particle_count, std::size_t mode_count,
               std::vector<std::size_t>& digits) {
    for (std::size_t p = particle_count; p-- > 0;) {
        digits[p] = flat % mode_count;
        flat /= mode_count;
    }
}

std::vector<std::size_t> alive_indices(const FirstQState& state) {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < state.particle_count; ++p) {
        if (state.alive[p]) {
            out.push_back(p);
        }
    }
    return out;
}

Element mutate_element(Element element, EngineMutation mutation) {
    if (mutation == EngineMutation::none) {
        return element;
    }
    if (auto* bs = std::get_if<Beamsplitter>(&element)) {
        bs->phi = -bs->phi;
    } else if (auto* ps = std::get_if<PhaseShifter>(&element)) {
        ps->phase = -ps->phase;
    } else if (auto* cps = std::get_if<ConditionalPhaseShifter>(&element)) {
        cps->phase = -cps->phase;
    }
    return element;
}

void require_valid(const Circuit& circuit) {
    const ValidationReport report = validate(circuit);
    if (!report.ok()) {
        std::ostringstream os;
        os << "run: invalid circuit:";
        for (const std::string& violation : report.violations) {
            os << " " << violation << ";";
        }
        throw std::invalid_argument(os.str());
    }
}

// Shared by the exhaustive and sampled runners.
FirstQState apply_stage_elements(FirstQState state, std::span<const Element> elements,
                                 const DetectorRecord& record, std::size_t mode_count,
                                 EngineMutation mutation, double* max_defect) {
    std::vector<Element> pending;
    auto note_defect = [&]() {
        if (max_defect != nullptr) {
            *max_defect = std::max(*max_defect, symmetry_defect(state));
        }
    };
    auto flush = [&]() {
        if (!pending.empty()) {
            state = evolve(state, compile_segment(pending, mode_count));
            pending.clear();
            note_defect();
        }
    };
    for (const Element& element : elements) {
        Element effective = mutate_element(element, mutation);
        if (const auto* cps = std::get_if<ConditionalPhaseShifter>(&effective)) {
            flush();
            state = conditional_phase_all(state, *cps, record);
            note_defect();
        } else {
            pending.push_back(std::move(effective));
        }
    }
    flush();
    return state;
}

}  // namespace

std::size_t FirstQState::tensor_size() const {
    std::size_t size = 1;
    for (std::size_t p = 0; p < particle_count; ++p) {
        size *= mode_count;
    }
    return size;
}

std::size_t FirstQState::stride(std::size_t particle) const {
    std::size_t out = 1;
    for (std::size_t p = particle + 1; p < particle_count; ++p) {
        out *= mode_count;
    }
    return out;
}

std::size_t FirstQState::alive_particles() const {
    return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), true));
}

double FirstQState::norm() const {
    double sum = 0.0;
    for (const Complex& amp : amplitudes) {
        sum += std::norm(amp);
    }
    return std::sqrt(sum);
}

FirstQState permanent_state(const SymmetrizedAssignment& modes, std::size_t mode_count) {
    if (mode_count < 1) {
        throw std::invalid_argument("permanent_state: mode_count must be >= 1");
    }
    for (ModeIndex mode : modes) {
        if (mode >= mode_count) {
            throw std::invalid_argument("permanent_state: mode index out of range");
        }
    }
    const std::size_t n = modes.size();
    if (n > 10) {
        throw std::invalid_argument("permanent_state: particle guard (n <= 10) exceeded");
    }

    FirstQState state;
    state.particle_count = n;
    state.mode_count = mode_count;
    state.amplitudes.assign(checked_tensor_size(n, mode_count), Complex(0.0, 0.0));
    state.alive.assign(n, true);
    state.detected_mode.assign(n, -1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    do {
        std::size_t flat = 0;
        for (std::size_t p = 0; p < n; ++p) {
            flat = flat * mode_count + modes[order[p]];
        }
        state.amplitudes[flat] += Complex(1.0, 0.0);
    } while (std::next_permutation(order.begin(), order.end()));

    std::vector<int> multiplicity(mode_count, 0);
    for (ModeIndex mode : modes) {
        ++multiplicity[mode];
    }
    double constant = factorial(static_cast<int>(n));
    for (int count : multiplicity) {
        constant *= factorial(count);
    }
    const double scale = 1.0 / std::sqrt(constant);
    for (Complex& amp : state.amplitudes) {
        amp *= scale;
    }
    return state;
}

FirstQState evolve(const FirstQState& state, const ModeUnitary& u) {
    if (u.dim() != state.mode_count) {
        throw std::invalid_argument("evolve: dimension mismatch");
    }
    const Eigen::MatrixXcd& mat = u.matrix();
    const std::size_t m = state.mode_count;

    FirstQState out = state;
    std::vector<Complex> column(m);
    for (std::size_t p = 0; p < state.particle_count; ++p) {
        if (!state.alive[p]) {
            continue;
        }
        const std::size_t stride = out.stride(p);
        const std::size_t block = stride * m;
        const std::size_t total = out.amplitudes.size();
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t offset = 0; offset < stride; ++offset) {
                for (std::size_t j = 0; j < m; ++j) {
                    column[j] = out.amplitudes[base + j * stride + offset];
                }
                for (std::size_t k = 0; k < m; ++k) {
                    Complex acc(0.0, 0.0);
                    for (std::size_t j = 0; j < m; ++j) {
                        acc += mat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) *
                               column[j];
                    }
                    out.amplitudes[base + k * stride + offset] = acc;
                }
            }
        }
    }
    return out;
}

std::vector<FirstQDetectionBranch> detect_mode(const FirstQState& state, ModeIndex mode) {
    if (mode >= state.mode_count) {
        throw std::invalid_argument("detect_mode: mode out of range");
    }
    const std::vector<std::size_t> alive = alive_indices(state);
    const std::size_t n = state.particle_count;

    std::vector<std::size_t> digits(n);
    std::map<int, double> count_probability;
    for (std::size_t flat = 0; flat < state.amplitudes.size(); ++flat) {
        const double weight = std::norm(state.amplitudes[flat]);
        if (weight == 0.0) {
            continue;
        }
        decompose(flat, n, state.mode_count, digits);
        int count = 0;
        for (std::size_t p : alive) {
            if (digits[p] == mode) {
                ++count;
            }
        }
        count_probability[count] += weight;
    }
    if (count_probability.empty()) {
        count_probability[0] = state.norm() * state.norm();
    }

    std::vector<FirstQDetectionBranch> branches;
    for (const auto& [count, probability] : count_probability) {
        if (probability < kBranchEps) {
            continue;
        }
        // canonical choice: the lowest-indexed alive particles are the ones
        // absorbed; exchange symmetry makes every other choice equivalent
        const std::vector<std::size_t> detected(alive.begin(),
                                                alive.begin() + static_cast<std::size_t>(count));

        FirstQDetectionBranch branch;
        branch.count = count;
        branch.probability = probability;
        branch.state = state;

        double kept = 0.0;
        for (std::size_t flat = 0; flat < branch.state.amplitudes.size(); ++flat) {
            decompose(flat, n, state.mode_count, digits);
            bool keep = true;
            for (std::size_t p : detected) {
                if (digits[p] != mode) {
                    keep = false;
                    break;
                }
            }
            if (keep) {
                for (std::size_t i = static_cast<std::size_t>(count); i < alive.size(); ++i) {
                    if (digits[alive[i]] == mode) {
                        keep = false;
                        break;
                    }
                }
            }
            if (!keep) {
                branch.state.amplitudes[flat] = Complex(0.0, 0.0);
            } else {
                kept += std::norm(branch.state.amplitudes[flat]);
            }
        }
        const double scale = kept > 0.0 ? 1.0 / std::sqrt(kept) : 0.0;
        for (Complex& amp : branch.state.amplitudes) {
            amp *= scale;
        }
        for (std::size_t p : detected) {
            branch.state.alive[p] = false;
            branch.state.detected_mode[p] = static_cast<int>(mode);
        }
        branches.push_back(std::move(branch));
    }
    return branches;
}

FirstQState conditional_phase_all(const FirstQState& state, const ConditionalPhaseShifter& element,
                                  const DetectorRecord& record) {
    const auto it = record.find(element.controller);
    if (it == record.end()) {
        throw std::invalid_argument("conditional_phase_all: missing controller record '" +
                                    element.controller + "'");
    }
    if (!element.trigger.matches(it->second)) {
        return state;
    }
    const std::vector<std::size_t> alive = alive_indices(state);
    FirstQState out = state;
    std::vector<std::size_t> digits(state.particle_count);
    for (std::size_t flat = 0; flat < out.amplitudes.size(); ++flat) {
        if (out.amplitudes[flat] == Complex(0.0, 0.0)) {
            continue;
        }
        decompose(flat, state.particle_count, state.mode_count, digits);
        int hits = 0;
        for (std::size_t p : alive) {
            if (digits[p] == element.mode) {
                ++hits;
            }
        }
        if (hits > 0) {
            out.amplitudes[flat] *= std::polar(1.0, element.phase * hits);
        }
    }
    return out;
}

double symmetry_defect(const FirstQState& state) {
    const std::vector<std::size_t> alive = alive_indices(state);
    if (alive.size() < 2) {
        return 0.0;
    }
    const std::size_t n = state.particle_count;
    const std::size_t m = state.mode_count;
    double defect = 0.0;
    std::vector<std::size_t> digits(n);
    for (std::size_t a = 0; a < alive.size(); ++a) {
        for (std::size_t b = a + 1; b < alive.size(); ++b) {
            const std::size_t p = alive[a];
            const std::size_t q = alive[b];
            const std::size_t stride_p = state.stride(p);
            const std::size_t stride_q = state.stride(q);
            for (std::size_t flat = 0; flat < state.amplitudes.size(); ++flat) {
                decompose(flat, n, m, digits);
                if (digits[p] >= digits[q]) {
                    continue;  // each unordered pair of entries visited once
                }
                const std::size_t swapped =
                    flat + (digits[q] - digits[p]) * stride_p - (digits[q] - digits[p]) * stride_q;
                defect = std::max(defect,
                                  std::abs(state.amplitudes[flat] - state.amplitudes[swapped]));
            }
        }
    }
    return defect;
}

FirstQRunResult run_firstq_exhaustive(const Circuit& circuit, EngineMutation mutation) {
    require_valid(circuit);
    const std::vector<Stage> stages = split_at_detectors(circuit);

    FirstQRunResult result;
    struct Frame {
        FirstQState state;
        DetectorRecord record;
        double probability;
        std::size_t stage;
    };
    std::vector<Frame> pending;
    pending.push_back({permanent_state(circuit.input_modes, circuit.mode_count), {}, 1.0, 0});
    result.max_symmetry_defect = symmetry_defect(pending.back().state);

    std::map<DetectorRecord, FirstQLeaf> leaves;
    while (!pending.empty()) {
        Frame frame = std::move(pending.back());
        pending.pop_back();
        if (frame.stage == stages.size()) {
            if (frame.probability >= kBranchEps) {
                leaves[frame.record] =
                    FirstQLeaf{frame.record, frame.probability, std::move(frame.state)};
            }
            continue;
        }
        const Stage& stage = stages[frame.stage];
        FirstQState state =
            apply_stage_elements(std::move(frame.state), stage.elements, frame.record,
                                 circuit.mode_count, mutation, &result.max_symmetry_defect);
        if (!stage.detector) {
            pending.push_back({std::move(state), frame.record, frame.probability, frame.stage + 1});
            continue;
        }
        for (FirstQDetectionBranch& branch : detect_mode(state, stage.detector->mode)) {
            result.max_symmetry_defect =
                std::max(result.max_symmetry_defect, symmetry_defect(branch.state));
            DetectorRecord record = frame.record;
            record[stage.detector->id] = branch.count;
            pending.push_back({std::move(branch.state), std::move(record),
                               frame.probability * branch.probability, frame.stage + 1});
        }
    }

    for (auto& [record, leaf] : leaves) {
        result.leaves.push_back(std::move(leaf));
    }
    return result;
}

std::map<DetectorRecord, long> run_firstq_sampled(const Circuit& circuit, std::uint64_t seed,
                                                  long shots) {
    if (shots < 1) {
        throw std::invalid_argument("run_firstq_sampled: shots must be >= 1");
    }
    require_valid(circuit);
    const std::vector<Stage> stages = split_at_detectors(circuit);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::map<DetectorRecord, long> counts;
    for (long shot = 0; shot < shots; ++shot) {
        FirstQState state = permanent_state(circuit.input_modes, circuit.mode_count);
        DetectorRecord record;
        for (const Stage& stage : stages) {
            state = apply_stage_elements(std::move(state), stage.elements, record,
                                         circuit.mode_count, EngineMutation::none, nullptr);
            if (!stage.detector) {
                continue;
            }
            std::vector<FirstQDetectionBranch> branches = detect_mode(state, stage.detector->mode);
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
