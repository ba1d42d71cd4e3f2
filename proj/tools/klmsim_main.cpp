// Command-line front end: load circuit files, run either engine, run the
// equivalence suite or one of the canned demos, and emit deterministic
// JSON/TSV reports.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "klmsim/demo_circuits.hpp"
#include "klmsim/equivalence.hpp"
#include "klmsim/serialize.hpp"

namespace {

using namespace klmsim;

constexpr int kExitOk = 0;
constexpr int kExitUsageOrValidation = 1;
constexpr int kExitEquivalenceFailure = 2;

struct EngineOptions {
    std::string circuit_path;
    std::string mode = "exhaustive";
    long shots = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_path;
};

void write_or_print(const std::string& json_text, const std::string& out_path,
                    const std::string& tsv) {
    if (out_path.empty()) {
        std::cout << json_text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + out_path);
    }
    out << json_text << "\n";
    std::cout << tsv;
}

int load_and_validate(const EngineOptions& options, Circuit& circuit) {
    try {
        circuit = circuit_from_json_file(options.circuit_path);
    } catch (const std::exception& err) {
        std::cerr << err.what() << "\n";
        return kExitUsageOrValidation;
    }
    const ValidationReport report = validate(circuit);
    if (!report.ok()) {
        std::cerr << "invalid circuit:\n";
        for (const std::string& violation : report.violations) {
            std::cerr << "  " << violation << "\n";
        }
        return kExitUsageOrValidation;
    }
    return kExitOk;
}

int check_sampled_options(const EngineOptions& options) {
    if (options.mode != "exhaustive" && options.mode != "sampled") {
        std::cerr << "--mode must be 'exhaustive' or 'sampled'\n";
        return kExitUsageOrValidation;
    }
    if (options.mode == "sampled" && (options.shots < 1 || !options.seed_set)) {
        std::cerr << "sampled mode requires --shots >= 1 and --seed\n";
        return kExitUsageOrValidation;
    }
    return kExitOk;
}

int run_engine(const EngineOptions& options, bool firstq) {
    if (int rc = check_sampled_options(options); rc != kExitOk) {
        return rc;
    }
    Circuit circuit;
    if (int rc = load_and_validate(options, circuit); rc != kExitOk) {
        return rc;
    }
    if (options.mode == "sampled") {
        const auto counts = firstq ? run_firstq_sampled(circuit, options.seed, options.shots)
                                   : run_fock_sampled(circuit, options.seed, options.shots);
        write_or_print(counts_to_json(counts, options.seed, options.shots), options.out_path,
                       counts_to_tsv(counts));
        return kExitOk;
    }
    std::vector<BranchOutcome> leaves;
    if (firstq) {
        leaves = firstq_leaves_to_outcomes(run_firstq_exhaustive(circuit).leaves);
    } else {
        leaves = run_fock_exhaustive(circuit);
    }
    write_or_print(branch_outcomes_to_json(leaves), options.out_path,
                   branch_outcomes_to_tsv(leaves));
    return kExitOk;
}

int run_equiv(const SuiteConfig& config, const std::string& out_path) {
    const EquivalenceReport report = run_equivalence_suite(config);
    const std::string json_text = equivalence_report_to_json(report);
    std::string summary;
    {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "circuits\tmax_tv\tmax_state_distance\tmax_symmetry_defect\tfailures\n"
                      "%d\t%.12g\t%.12g\t%.12g\t%zu\n",
                      report.circuits_tested, report.max_distribution_distance,
                      report.max_state_distance, report.max_symmetry_defect,
                      report.failures.size());
        summary = buf;
    }
    if (out_path.empty()) {
        std::cout << json_text << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot open output file: " << out_path << "\n";
            return kExitUsageOrValidation;
        }
        out << json_text << "\n";
        std::cout << summary;
    }
    return report.ok() ? kExitOk : kExitEquivalenceFailure;
}

int demo_hom(const std::string& out_path) {
    const std::vector<BranchOutcome> leaves = run_fock_exhaustive(hom_circuit());
    double coincidence = 0.0;
    for (const BranchOutcome& leaf : leaves) {
        if (leaf.record.at("D1") == 1 && leaf.record.at("D2") == 1) {
            coincidence = leaf.probability;
        }
    }
    std::cout << branch_outcomes_to_tsv(leaves);
    std::printf("coincidence\t%.12g\n", coincidence);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << branch_outcomes_to_json(leaves) << "\n";
    }
    return kExitOk;
}

int demo_eq7(const std::string& out_path) {
    // two symmetrized photons through per-particle 50/50 beamsplitters
    Eigen::MatrixXcd u(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    u << s, s, s, -s;
    const FirstQState out = evolve(permanent_state({0, 1}, 2), ModeUnitary(u));
    std::cout << "particle_modes\tre\tim\n";
    for (std::size_t flat = 0; flat < out.amplitudes.size(); ++flat) {
        const std::size_t first = flat / 2;
        const std::size_t second = flat % 2;
        std::printf("%zu,%zu\t%.12g\t%.12g\n", first, second, out.amplitudes[flat].real(),
                    out.amplitudes[flat].imag());
    }
    if (!out_path.empty()) {
        const FirstQLeaf leaf{{}, 1.0, out};
        std::ofstream file(out_path);
        file << branch_outcomes_to_json(firstq_leaves_to_outcomes({leaf})) << "\n";
    }
    return kExitOk;
}

int demo_fig3(const std::string& out_path) {
    const Circuit circuit = feedforward_showcase_circuit();
    const std::vector<BranchOutcome> fock_leaves = run_fock_exhaustive(circuit);
    const std::vector<BranchOutcome> firstq_leaves =
        firstq_leaves_to_outcomes(run_firstq_exhaustive(circuit).leaves);

    std::map<DetectorRecord, const BranchOutcome*> by_record;
    for (const BranchOutcome& leaf : firstq_leaves) {
        by_record[leaf.record] = &leaf;
    }
    double max_p_diff = 0.0;
    double max_state_distance = 0.0;
    std::cout << "record\tp_fock\tp_firstq\tstate_distance\n";
    for (const BranchOutcome& leaf : fock_leaves) {
        const auto it = by_record.find(leaf.record);
        const double p_firstq = it == by_record.end() ? 0.0 : it->second->probability;
        const double distance =
            it == by_record.end() ? 1.0 : phase_aligned_distance(leaf.state, it->second->state);
        max_p_diff = std::max(max_p_diff, std::abs(leaf.probability - p_firstq));
        max_state_distance = std::max(max_state_distance, distance);
        std::printf("%s\t%.12g\t%.12g\t%.3g\n", format_record(leaf.record).c_str(),
                    leaf.probability, p_firstq, distance);
    }
    std::printf("max_p_diff\t%.3g\nmax_state_distance\t%.3g\n", max_p_diff, max_state_distance);
    if (!out_path.empty()) {
        std::ofstream file(out_path);
        file << branch_outcomes_to_json(fock_leaves) << "\n";
    }
    return (max_p_diff < kEquivalenceTol && max_state_distance < kEquivalenceTol)
               ? kExitOk
               : kExitEquivalenceFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-representation simulator for linear-optical circuits with "
                 "photon-number detectors and feed-forward"};
    app.require_subcommand(1);

    EngineOptions fock_options;
    CLI::App* run_fock = app.add_subcommand("run-fock", "run the Fock-space engine");
    run_fock->add_option("--circuit", fock_options.circuit_path, "circuit JSON file")->required();
    run_fock->add_option("--mode", fock_options.mode, "exhaustive|sampled");
    run_fock->add_option("--shots", fock_options.shots, "samples in sampled mode");
    run_fock->add_option("--seed", fock_options.seed, "generator seed in sampled mode")
        ->each([&fock_options](const std::string&) { fock_options.seed_set = true; });
    run_fock->add_option("--out", fock_options.out_path, "write JSON here, TSV to stdout");

    EngineOptions firstq_options;
    CLI::App* run_firstq = app.add_subcommand("run-firstq", "run the first-quantized engine");
    run_firstq->add_option("--circuit", firstq_options.circuit_path, "circuit JSON file")
        ->required();
    run_firstq->add_option("--mode", firstq_options.mode, "exhaustive|sampled");
    run_firstq->add_option("--shots", firstq_options.shots, "samples in sampled mode");
    run_firstq->add_option("--seed", firstq_options.seed, "generator seed in sampled mode")
        ->each([&firstq_options](const std::string&) { firstq_options.seed_set = true; });
    run_firstq->add_option("--out", firstq_options.out_path, "write JSON here, TSV to stdout");

    SuiteConfig suite_config;
    std::string equiv_out;
    CLI::App* equiv = app.add_subcommand(
        "equiv", "certify both engines against each other on random circuits");
    equiv->add_option("--trials", suite_config.trials, "number of random circuits");
    equiv->add_option("--seed", suite_config.seed, "suite seed");
    equiv->add_option("--max-modes", suite_config.max_modes, "mode-count bound");
    equiv->add_option("--max-photons", suite_config.max_photons, "photon-count bound");
    equiv->add_option("--max-detectors", suite_config.max_detectors, "detector-count bound");
    equiv->add_option("--out", equiv_out, "write the JSON report here, summary to stdout");

    std::string demo_name;
    std::string demo_out;
    CLI::App* demo = app.add_subcommand("demo", "run a canned demonstration");
    demo->add_option("name", demo_name, "hom | eq7 | fig3")->required();
    demo->add_option("--out", demo_out, "write the JSON result here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kExitUsageOrValidation;
    }

    try {
        if (run_fock->parsed()) {
            return run_engine(fock_options, false);
        }
        if (run_firstq->parsed()) {
            return run_engine(firstq_options, true);
        }
        if (equiv->parsed()) {
            return run_equiv(suite_config, equiv_out);
        }
        if (demo_name == "hom") {
            return demo_hom(demo_out);
        }
        if (demo_name == "eq7") {
            return demo_eq7(demo_out);
        }
        if (demo_name == "fig3") {
            return demo_fig3(demo_out);
        }
        std::cerr << "unknown demo '" << demo_name << "' (expected hom, eq7 or fig3)\n";
        return kExitUsageOrValidation;
    } catch (const std::exception& err) {
        std::cerr << err.what() << "\n";
        return kExitUsageOrValidation;
    }
}
