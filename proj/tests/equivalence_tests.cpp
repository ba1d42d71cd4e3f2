#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "klmsim/equivalence.hpp"

using namespace klmsim;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Complex amp_at(const FockVector& state, const FockBasisState& occ) {
    const auto it = state.amplitudes.find(occ);
    return it == state.amplitudes.end() ? Complex(0.0, 0.0) : it->second;
}

ModeUnitary haar_random_unitary(std::size_t m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto dim = static_cast<Eigen::Index>(m);
    Eigen::MatrixXcd ginibre(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            ginibre(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < dim; ++c) {
        const Complex d = r(c, c);
        q.col(c) *= d / std::abs(d);
    }
    return ModeUnitary(q);
}

ComplexMatrix random_complex_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            m(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    return m;
}

// Random unit vector in the N-photon sector over m modes.
FockVector random_fock_vector(std::size_t m, std::size_t photons, std::mt19937_64& rng) {
    Circuit circuit;
    circuit.mode_count = m;
    for (std::size_t i = 0; i < photons; ++i) {
        circuit.input_modes.push_back(rng() % m);
    }
    FockVector state = input_state(circuit);
    return apply_unitary(state, haar_random_unitary(m, rng));
}

double tensor_distance(const FirstQState& a, const FirstQState& b) {
    REQUIRE(a.amplitudes.size() == b.amplitudes.size());
    double sum = 0.0;
    for (std::size_t flat = 0; flat < a.amplitudes.size(); ++flat) {
        sum += std::norm(a.amplitudes[flat] - b.amplitudes[flat]);
    }
    return std::sqrt(sum);
}

}  // namespace

TEST_CASE("permanent_naive on small closed forms") {
    CHECK(std::abs(permanent_naive(ComplexMatrix::Identity(4, 4)) - Complex(1, 0)) == 0.0);
    CHECK(std::abs(permanent_naive(ComplexMatrix::Ones(3, 3)) - Complex(6, 0)) == 0.0);
    ComplexMatrix m(2, 2);
    m << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
    CHECK(std::abs(permanent_naive(m) - Complex(10, 0)) == 0.0);
    CHECK(std::abs(permanent_naive(ComplexMatrix(0, 0)) - Complex(1, 0)) == 0.0);
}

TEST_CASE("permanent_naive guards") {
    CHECK_THROWS_AS(permanent_naive(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
    CHECK_THROWS_AS(permanent_naive(ComplexMatrix::Zero(10, 10)), std::invalid_argument);
}

TEST_CASE("permanent_ryser on identities and all-ones matrices") {
    for (int n = 1; n <= 8; ++n) {
        CHECK(permanent_ryser(ComplexMatrix::Identity(n, n)) == Complex(1, 0));
        CHECK(permanent_ryser(ComplexMatrix::Ones(n, n)) == Complex(factorial(n), 0));
    }
    CHECK_THROWS_AS(permanent_ryser(ComplexMatrix::Zero(1, 2)), std::invalid_argument);
}

TEST_CASE("permanent_ryser agrees with the naive oracle") {
    std::mt19937_64 rng(4242);
    for (int iteration = 0; iteration < 200; ++iteration) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const ComplexMatrix m = random_complex_matrix(n, rng);
        const Complex naive = permanent_naive(m);
        const Complex ryser = permanent_ryser(m);
        CHECK(std::abs(naive - ryser) < 1e-9 * std::max(1.0, std::abs(naive)));
    }
}

TEST_CASE("fock_to_fq maps occupations to symmetric tensors") {
    FockVector pair;
    pair.mode_count = 2;
    pair.amplitudes[{1, 1}] = Complex(1.0, 0.0);
    const FirstQState mapped = fock_to_fq(pair);
    CHECK(std::abs(mapped.amplitudes[1] - Complex(kInvSqrt2, 0)) < 1e-14);
    CHECK(std::abs(mapped.amplitudes[2] - Complex(kInvSqrt2, 0)) < 1e-14);

    FockVector bunched;
    bunched.mode_count = 2;
    bunched.amplitudes[{2, 0}] = Complex(1.0, 0.0);
    const FirstQState mapped2 = fock_to_fq(bunched);
    CHECK(std::abs(mapped2.amplitudes[0] - Complex(1.0, 0)) < 1e-14);

    FockVector hom;
    hom.mode_count = 2;
    hom.amplitudes[{2, 0}] = Complex(kInvSqrt2, 0.0);
    hom.amplitudes[{0, 2}] = Complex(-kInvSqrt2, 0.0);
    const FirstQState mapped3 = fock_to_fq(hom);
    CHECK(std::abs(mapped3.amplitudes[0] - Complex(kInvSqrt2, 0)) < 1e-14);
    CHECK(std::abs(mapped3.amplitudes[3] - Complex(-kInvSqrt2, 0)) < 1e-14);
    CHECK(std::abs(mapped3.amplitudes[1]) < 1e-15);
}

TEST_CASE("fock_to_fq is an isometry") {
    std::mt19937_64 rng(17);
    for (int iteration = 0; iteration < 20; ++iteration) {
        const std::size_t m = 2 + rng() % 3;
        const std::size_t photons = 1 + rng() % 3;
        const FockVector u = random_fock_vector(m, photons, rng);
        const FockVector v = random_fock_vector(m, photons, rng);

        Complex fock_inner(0.0, 0.0);
        for (const auto& [occ, amp] : u.amplitudes) {
            const auto it = v.amplitudes.find(occ);
            if (it != v.amplitudes.end()) {
                fock_inner += std::conj(amp) * it->second;
            }
        }
        const FirstQState mu = fock_to_fq(u);
        const FirstQState mv = fock_to_fq(v);
        Complex tensor_inner(0.0, 0.0);
        for (std::size_t flat = 0; flat < mu.amplitudes.size(); ++flat) {
            tensor_inner += std::conj(mu.amplitudes[flat]) * mv.amplitudes[flat];
        }
        CHECK(std::abs(fock_inner - tensor_inner) < 1e-10);
        CHECK(std::abs(mu.norm() - 1.0) < 1e-10);
        CHECK(symmetry_defect(mu) < 1e-12);
    }
}

TEST_CASE("fq_to_fock inverts fock_to_fq") {
    std::mt19937_64 rng(23);
    for (int iteration = 0; iteration < 100; ++iteration) {
        const std::size_t m = 2 + rng() % 3;
        const std::size_t photons = 1 + rng() % 3;
        const FockVector v = random_fock_vector(m, photons, rng);
        const FockVector back = fq_to_fock(fock_to_fq(v));
        CHECK(phase_aligned_distance(v, back) < 1e-10);
        // exact inverse, not just up to phase
        for (const auto& [occ, amp] : v.amplitudes) {
            CHECK(std::abs(amp_at(back, occ) - amp) < 1e-10);
        }
    }
}

TEST_CASE("fq_to_fock maps the symmetric pair back to |1,1>") {
    const FockVector fock = fq_to_fock(permanent_state({0, 1}, 2));
    REQUIRE(fock.amplitudes.size() == 1);
    CHECK(std::abs(amp_at(fock, {1, 1}) - Complex(1.0, 0)) < 1e-14);
}

TEST_CASE("fq_to_fock rejects antisymmetric states") {
    FirstQState singlet;
    singlet.particle_count = 2;
    singlet.mode_count = 2;
    singlet.amplitudes = {Complex(0, 0), Complex(kInvSqrt2, 0), Complex(-kInvSqrt2, 0),
                          Complex(0, 0)};
    singlet.alive = {true, true};
    singlet.detected_mode = {-1, -1};
    CHECK_THROWS_WITH_AS(fq_to_fock(singlet), doctest::Contains("not in bosonic sector"),
                         std::invalid_argument);
}

TEST_CASE("fq_to_fock on the zero-particle scalar returns the vacuum") {
    const FockVector vacuum = fq_to_fock(permanent_state({}, 3));
    REQUIRE(vacuum.amplitudes.size() == 1);
    CHECK(std::abs(amp_at(vacuum, {0, 0, 0}) - Complex(1.0, 0)) < 1e-15);
}

TEST_CASE("transition_amplitude_oracle vanishes on the dip") {
    Eigen::MatrixXcd u(2, 2);
    u << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    const Complex amp = transition_amplitude_oracle(ModeUnitary(u), {1, 1}, {1, 1});
    CHECK(std::abs(amp) < 1e-14);
}

TEST_CASE("transition_amplitude_oracle under the identity is a delta") {
    const ModeUnitary id = ModeUnitary::identity(3);
    CHECK(std::abs(transition_amplitude_oracle(id, {2, 1, 0}, {2, 1, 0}) - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(transition_amplitude_oracle(id, {2, 1, 0}, {1, 2, 0})) < 1e-14);
    CHECK_THROWS_AS(transition_amplitude_oracle(id, {2, 1, 0}, {1, 1, 0}),
                    std::invalid_argument);
}

TEST_CASE("transition_amplitude_oracle matches apply_unitary matrix elements") {
    std::mt19937_64 rng(37);
    const ModeUnitary u = haar_random_unitary(3, rng);
    Circuit circuit;
    circuit.mode_count = 3;
    circuit.input_modes = {0, 1, 2};
    const FockVector in = input_state(circuit);
    const FockVector out = apply_unitary(in, u);
    for (const auto& [occ, amp] : out.amplitudes) {
        const Complex oracle = transition_amplitude_oracle(u, {1, 1, 1}, occ);
        CHECK(std::abs(oracle - amp) < 1e-10);
    }
}

TEST_CASE("intertwining: evolve commutes with the representation map") {
    std::mt19937_64 rng(51);
    for (int iteration = 0; iteration < 30; ++iteration) {
        const std::size_t m = 2 + rng() % 4;   // up to 5 modes
        const std::size_t photons = 1 + rng() % 3;
        const FockVector v = random_fock_vector(m, photons, rng);
        const ModeUnitary u = haar_random_unitary(m, rng);
        const FirstQState left = fock_to_fq(apply_unitary(v, u));
        const FirstQState right = evolve(fock_to_fq(v), u);
        CHECK(tensor_distance(left, right) < 1e-10);
    }
}

TEST_CASE("product evolution preserves Schmidt coefficients") {
    std::mt19937_64 rng(61);
    for (int iteration = 0; iteration < 5; ++iteration) {
        const std::size_t m = 3;
        const FirstQState state = fock_to_fq(random_fock_vector(m, 3, rng));
        const FirstQState evolved = evolve(state, haar_random_unitary(m, rng));

        auto singular_values = [m](const FirstQState& s) {
            Eigen::MatrixXcd reshaped(m, m * m);
            for (std::size_t flat = 0; flat < s.amplitudes.size(); ++flat) {
                reshaped(static_cast<Eigen::Index>(flat / (m * m)),
                         static_cast<Eigen::Index>(flat % (m * m))) = s.amplitudes[flat];
            }
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(reshaped);
            return svd.singularValues();
        };
        const Eigen::VectorXd before = singular_values(state);
        const Eigen::VectorXd after = singular_values(evolved);
        REQUIRE(before.size() == after.size());
        for (Eigen::Index i = 0; i < before.size(); ++i) {
            CHECK(std::abs(before(i) - after(i)) < 1e-9);
        }
    }
}

TEST_CASE("phase_aligned_distance ignores a global phase") {
    FockVector a;
    a.mode_count = 2;
    a.amplitudes[{1, 0}] = Complex(kInvSqrt2, 0.0);
    a.amplitudes[{0, 1}] = Complex(0.0, kInvSqrt2);
    FockVector b;
    b.mode_count = 2;
    const Complex phase = std::polar(1.0, 1.234);
    b.amplitudes[{1, 0}] = phase * Complex(kInvSqrt2, 0.0);
    b.amplitudes[{0, 1}] = phase * Complex(0.0, kInvSqrt2);
    CHECK(phase_aligned_distance(a, b) < 1e-12);

    FockVector c;
    c.mode_count = 2;
    c.amplitudes[{1, 0}] = Complex(0.0, kInvSqrt2);
    c.amplitudes[{0, 1}] = Complex(kInvSqrt2, 0.0);
    CHECK(phase_aligned_distance(a, c) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("random_circuit always validates and runs on both engines") {
    std::mt19937_64 rng(77);
    for (int iteration = 0; iteration < 200; ++iteration) {
        const Circuit circuit = random_circuit(rng, 5, 3, 2);
        CAPTURE(circuit_to_json_text(circuit));
        CHECK(validate(circuit).ok());
    }
    // spot-run a few through both engines end to end
    for (int iteration = 0; iteration < 10; ++iteration) {
        const Circuit circuit = random_circuit(rng, 4, 2, 2);
        double total = 0.0;
        for (const BranchOutcome& leaf : run_fock_exhaustive(circuit)) {
            total += leaf.probability;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        total = 0.0;
        for (const FirstQLeaf& leaf : run_firstq_exhaustive(circuit).leaves) {
            total += leaf.probability;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("validate rejects every class of broken mutation") {
    std::mt19937_64 rng(88);
    for (int iteration = 0; iteration < 100; ++iteration) {
        Circuit circuit = random_circuit(rng, 5, 3, 2);
        switch (iteration % 5) {
            case 0:
                circuit.input_modes.push_back(circuit.mode_count + 1);
                break;
            case 1:
                circuit.elements.push_back(Beamsplitter{1, 1, 0.3, 0.0});
                break;
            case 2:
                circuit.elements.push_back(
                    ConditionalPhaseShifter{0, 0.1, "nope", {Trigger::Op::AtLeast, 1}});
                break;
            case 3:
                circuit.elements.push_back(Detector{0, "Dup"});
                circuit.elements.push_back(Detector{1, "Dup"});
                break;
            default:
                circuit.elements.insert(
                    circuit.elements.begin(),
                    ConditionalPhaseShifter{0, 0.1, "Later", {Trigger::Op::Equal, 0}});
                circuit.elements.push_back(Detector{0, "Later"});
                break;
        }
        CHECK_FALSE(validate(circuit).ok());
    }
}

TEST_CASE("equivalence suite passes on a small run") {
    SuiteConfig config;
    config.trials = 10;
    config.seed = 7;
    const EquivalenceReport report = run_equivalence_suite(config);
    CHECK(report.circuits_tested == 10);
    CHECK(report.ok());
    CHECK(report.max_distribution_distance < 1e-9);
    CHECK(report.max_state_distance < 1e-9);
    CHECK(report.max_symmetry_defect < 1e-10);
}

TEST_CASE("equivalence suite with zero trials reports nothing") {
    SuiteConfig config;
    config.trials = 0;
    const EquivalenceReport report = run_equivalence_suite(config);
    CHECK(report.circuits_tested == 0);
    CHECK(report.max_distribution_distance == 0.0);
    CHECK(report.max_state_distance == 0.0);
    CHECK(report.ok());
}

TEST_CASE("equivalence suite detects a deliberately corrupted engine") {
    SuiteConfig config;
    config.trials = 10;
    config.seed = 7;
    config.mutation = EngineMutation::flip_phase_sign;
    const EquivalenceReport report = run_equivalence_suite(config);
    CHECK_FALSE(report.ok());
    CHECK(report.failures.size() >= 1);
}
