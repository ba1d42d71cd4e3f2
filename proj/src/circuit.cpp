#include "klmsim/circuit.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace klmsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

ValidationReport validate(const Circuit& circuit) {
    ValidationReport report;
    auto flag = [&report](const std::string& msg) { report.violations.push_back(msg); };

    const std::size_t m = circuit.mode_count;
    if (m < 1) {
        flag("mode count must be at least 1");
    }
    for (std::size_t i = 0; i < circuit.input_modes.size(); ++i) {
        if (circuit.input_modes[i] >= m) {
            std::ostringstream os;
            os << "input mode #" << i << ": bad mode index " << circuit.input_modes[i];
            flag(os.str());
        }
    }

    std::set<std::string> seen_detectors;
    std::set<std::string> all_detectors;
    for (const auto& element : circuit.elements) {
        if (const auto* det = std::get_if<Detector>(&element)) {
            all_detectors.insert(det->id);
        }
    }

    for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
        std::ostringstream os;
        os << "element #" << i << ": ";
        const std::string prefix = os.str();
        std::visit(
            Overloaded{
                [&](const Beamsplitter& bs) {
                    if (bs.mode_a >= m || bs.mode_b >= m) {
                        flag(prefix + "bad mode index on beamsplitter");
                    }
                    if (bs.mode_a == bs.mode_b) {
                        flag(prefix + "degenerate beamsplitter (mode_a == mode_b)");
                    }
                },
                [&](const PhaseShifter& ps) {
                    if (ps.mode >= m) {
                        flag(prefix + "bad mode index on phase shifter");
                    }
                },
                [&](const Detector& det) {
                    if (det.mode >= m) {
                        flag(prefix + "bad mode index on detector");
                    }
                    if (!seen_detectors.insert(det.id).second) {
                        flag(prefix + "duplicate detector_id '" + det.id + "'");
                    }
                },
                [&](const ConditionalPhaseShifter& cps) {
                    if (cps.mode >= m) {
                        flag(prefix + "bad mode index on conditional phase shifter");
                    }
                    if (all_detectors.count(cps.controller) == 0) {
                        flag(prefix + "dangling controller '" + cps.controller + "'");
                    } else if (seen_detectors.count(cps.controller) == 0) {
                        flag(prefix + "forward-referencing condition (controller '" +
                             cps.controller + "' not measured yet)");
                    }
                },
            },
            circuit.elements[i]);
    }
    return report;
}

ModeUnitary::ModeUnitary(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
        throw std::invalid_argument("ModeUnitary: matrix must be square and non-empty");
    }
    const Eigen::MatrixXcd gram = matrix_ * matrix_.adjoint();
    const double defect =
        (gram - Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols())).cwiseAbs().maxCoeff();
    if (defect >= kUnitarityTol) {
        std::ostringstream os;
        os << "ModeUnitary: matrix not unitary (defect " << defect << ")";
        throw std::invalid_argument(os.str());
    }
}

ModeUnitary ModeUnitary::identity(std::size_t mode_count) {
    return ModeUnitary(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(mode_count),
                                                  static_cast<Eigen::Index>(mode_count)));
}

Eigen::Matrix2cd beamsplitter_unitary(double theta, double phi) {
    Eigen::Matrix2cd u;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    u(0, 0) = Complex(c, 0.0);
    u(0, 1) = std::polar(s, phi);
    u(1, 0) = std::polar(s, -phi);
    u(1, 1) = Complex(-c, 0.0);
    return u;
}

ModeUnitary compile_segment(std::span<const Element> elements, std::size_t mode_count,
                            const DetectorRecord& record) {
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(mode_count),
                                                        static_cast<Eigen::Index>(mode_count));
    for (const Element& element : elements) {
        std::visit(
            Overloaded{
                [&](const Beamsplitter& bs) {
                    const Eigen::Matrix2cd u = beamsplitter_unitary(bs.theta, bs.phi);
                    const Eigen::Index a = static_cast<Eigen::Index>(bs.mode_a);
                    const Eigen::Index b = static_cast<Eigen::Index>(bs.mode_b);
                    // left-multiplying by the embedded 2x2 mixes rows a and b
                    const Eigen::RowVectorXcd row_a = total.row(a);
                    const Eigen::RowVectorXcd row_b = total.row(b);
                    total.row(a) = u(0, 0) * row_a + u(0, 1) * row_b;
                    total.row(b) = u(1, 0) * row_a + u(1, 1) * row_b;
                },
                [&](const PhaseShifter& ps) {
                    total.row(static_cast<Eigen::Index>(ps.mode)) *= std::polar(1.0, ps.phase);
                },
                [&](const Detector&) {
                    throw std::invalid_argument("compile_segment: unsplit segment (detector present)");
                },
                [&](const ConditionalPhaseShifter& cps) {
                    const auto it = record.find(cps.controller);
                    if (it == record.end()) {
                        throw std::invalid_argument(
                            "compile_segment: unresolved condition (controller '" +
                            cps.controller + "' has no recorded outcome)");
                    }
                    if (cps.trigger.matches(it->second)) {
                        total.row(static_cast<Eigen::Index>(cps.mode)) *= std::polar(1.0, cps.phase);
                    }
                },
            },
            element);
    }
    return ModeUnitary(std::move(total));
}

std::vector<Stage> split_at_detectors(const Circuit& circuit) {
    std::vector<Stage> stages;
    Stage current;
    for (const Element& element : circuit.elements) {
        if (const auto* det = std::get_if<Detector>(&element)) {
            current.detector = *det;
            stages.push_back(std::move(current));
            current = Stage{};
        } else {
            current.elements.push_back(element);
        }
    }
    if (!current.elements.empty() || stages.empty()) {
        stages.push_back(std::move(current));
    }
    return stages;
}

}  // namespace klmsim
