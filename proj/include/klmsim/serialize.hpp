#pragma once

#include <cstdint>
#include <string>

#include "klmsim/equivalence.hpp"
#include "klmsim/fock.hpp"
#include "klmsim/firstq.hpp"

namespace klmsim {

// JSON is the output contract; the TSV twins are for quick diffing.
// All output is deterministic: records and occupations are emitted in
// lexicographic order and numbers round-trip exactly.

std::string branch_outcomes_to_json(const std::vector<BranchOutcome>& leaves);
std::string branch_outcomes_to_tsv(const std::vector<BranchOutcome>& leaves);

/// First-quantized leaves use the same schema as the Fock engine: states are
/// serialized in occupation representation after mapping through fq_to_fock.
std::vector<BranchOutcome> firstq_leaves_to_outcomes(const std::vector<FirstQLeaf>& leaves);

std::string counts_to_json(const std::map<DetectorRecord, long>& counts, std::uint64_t seed,
                           long shots);
std::string counts_to_tsv(const std::map<DetectorRecord, long>& counts);

std::string equivalence_report_to_json(const EquivalenceReport& report);

std::string format_record(const DetectorRecord& record);

}  // namespace klmsim
