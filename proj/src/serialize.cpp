#include "klmsim/serialize.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace klmsim {

namespace {

using nlohmann::json;

json record_to_json(const DetectorRecord& record) {
    json obj = json::object();
    for (const auto& [id, count] : record) {
        obj[id] = count;
    }
    return obj;
}

json state_to_json(const FockVector& state) {
    json arr = json::array();
    for (const auto& [occ, amp] : state.amplitudes) {
        arr.push_back({{"occ", occ}, {"re", amp.real()}, {"im", amp.imag()}});
    }
    return arr;
}

json leaf_to_json(const BranchOutcome& leaf) {
    return {{"record", record_to_json(leaf.record)},
            {"p", leaf.probability},
            {"state", state_to_json(leaf.state)}};
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

}  // namespace

std::string format_record(const DetectorRecord& record) {
    if (record.empty()) {
        return "-";
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& [id, count] : record) {
        os << (first ? "" : ",") << id << "=" << count;
        first = false;
    }
    return os.str();
}

std::string branch_outcomes_to_json(const std::vector<BranchOutcome>& leaves) {
    json arr = json::array();
    for (const BranchOutcome& leaf : leaves) {
        arr.push_back(leaf_to_json(leaf));
    }
    return arr.dump(2);
}

std::string branch_outcomes_to_tsv(const std::vector<BranchOutcome>& leaves) {
    std::ostringstream os;
    os << "record\tp\n";
    for (const BranchOutcome& leaf : leaves) {
        os << format_record(leaf.record) << "\t" << format_double(leaf.probability) << "\n";
    }
    return os.str();
}

std::vector<BranchOutcome> firstq_leaves_to_outcomes(const std::vector<FirstQLeaf>& leaves) {
    std::vector<BranchOutcome> out;
    out.reserve(leaves.size());
    for (const FirstQLeaf& leaf : leaves) {
        out.push_back({leaf.record, leaf.probability, fq_to_fock(leaf.state)});
    }
    return out;
}

std::string counts_to_json(const std::map<DetectorRecord, long>& counts, std::uint64_t seed,
                           long shots) {
    json doc;
    doc["seed"] = seed;
    doc["shots"] = shots;
    doc["counts"] = json::array();
    for (const auto& [record, count] : counts) {
        doc["counts"].push_back({{"record", record_to_json(record)}, {"count", count}});
    }
    return doc.dump(2);
}

std::string counts_to_tsv(const std::map<DetectorRecord, long>& counts) {
    std::ostringstream os;
    os << "record\tcount\n";
    for (const auto& [record, count] : counts) {
        os << format_record(record) << "\t" << count << "\n";
    }
    return os.str();
}

std::string equivalence_report_to_json(const EquivalenceReport& report) {
    json doc;
    doc["circuits_tested"] = report.circuits_tested;
    doc["max_distribution_distance"] = report.max_distribution_distance;
    doc["max_state_distance"] = report.max_state_distance;
    doc["max_symmetry_defect"] = report.max_symmetry_defect;
    doc["failures"] = json::array();
    for (const EquivalenceFailure& failure : report.failures) {
        doc["failures"].push_back({{"trial", failure.trial},
                                   {"kind", failure.kind},
                                   {"record", record_to_json(failure.record)},
                                   {"value", failure.value},
                                   {"circuit", json::parse(circuit_to_json_text(failure.circuit))}});
    }
    return doc.dump(2);
}

}  // namespace klmsim
