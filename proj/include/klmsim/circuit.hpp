#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "klmsim/common.hpp"

namespace klmsim {

using ModeIndex = std::size_t;

/// Predicate on a detector's photon count. Supported forms: count == k
/// and count >= k.
struct Trigger {
    enum class Op { Equal, AtLeast };
    Op op = Op::AtLeast;
    int threshold = 1;

    bool matches(int count) const {
        return op == Op::Equal ? count == threshold : count >= threshold;
    }
    bool operator==(const Trigger&) const = default;
};

struct Beamsplitter {
    ModeIndex mode_a = 0;
    ModeIndex mode_b = 0;
    double theta = 0.0;  // radians
    double phi = 0.0;
    bool operator==(const Beamsplitter&) const = default;
};

struct PhaseShifter {
    ModeIndex mode = 0;
    double phase = 0.0;
    bool operator==(const PhaseShifter&) const = default;
};

struct Detector {
    ModeIndex mode = 0;
    std::string id;
    bool operator==(const Detector&) const = default;
};

/// Phase shifter gated on the outcome of a detector measured earlier in the
/// circuit (classical feed-forward).
struct ConditionalPhaseShifter {
    ModeIndex mode = 0;
    double phase = 0.0;
    std::string controller;  // detector id
    Trigger trigger;
    bool operator==(const ConditionalPhaseShifter&) const = default;
};

using Element = std::variant<Beamsplitter, PhaseShifter, Detector, ConditionalPhaseShifter>;

/// Classical measurement results accumulated while a circuit runs,
/// detector id -> observed photon count.
using DetectorRecord = std::map<std::string, int>;

/// Ordered program of linear elements, detectors and feed-forward phases.
/// Elements apply left to right in declaration order. One photon enters per
/// input_modes entry (repeats give multiple photons in one mode).
struct Circuit {
    std::size_t mode_count = 0;
    std::vector<ModeIndex> input_modes;
    std::vector<Element> elements;

    std::size_t photon_count() const { return input_modes.size(); }
    bool operator==(const Circuit&) const = default;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Collects every violation instead of stopping at the first: bad mode
/// indices, degenerate beamsplitters, duplicate detector ids, dangling or
/// forward-referencing controllers.
ValidationReport validate(const Circuit& circuit);

/// m x m complex matrix, checked unitary to kUnitarityTol on construction.
class ModeUnitary {
  public:
    explicit ModeUnitary(Eigen::MatrixXcd matrix);

    static ModeUnitary identity(std::size_t mode_count);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  private:
    Eigen::MatrixXcd matrix_;
};

/// [[cos t, e^{i p} sin t], [e^{-i p} sin t, -cos t]]; columns act on the
/// incoming modes, so theta = pi/4, phi = 0 sends input 0 to (out0 + out1)/sqrt(2)
/// and input 1 to (out0 - out1)/sqrt(2).
Eigen::Matrix2cd beamsplitter_unitary(double theta, double phi);

/// Product of the per-element unitaries in circuit order, each embedded as
/// identity outside its modes. Detectors are rejected ("unsplit segment").
/// Conditional phase shifters are resolved against `record`; a missing
/// controller entry is an error.
ModeUnitary compile_segment(std::span<const Element> elements, std::size_t mode_count,
                            const DetectorRecord& record = {});

/// Maximal detector-free prefix followed by at most one detector. Only the
/// trailing stage may lack a detector.
struct Stage {
    std::vector<Element> elements;
    std::optional<Detector> detector;
};

/// Partitions the element list into stages; flattening the stages in order
/// reproduces the original element sequence exactly.
std::vector<Stage> split_at_detectors(const Circuit& circuit);

// Strict JSON circuit format; unknown keys are rejected at every level.
Circuit circuit_from_json_text(const std::string& text);
Circuit circuit_from_json_file(const std::string& path);
std::string circuit_to_json_text(const Circuit& circuit);

}  // namespace klmsim
