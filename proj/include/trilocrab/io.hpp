#pragma once

#include "trilocrab/hierarchy.hpp"
#include "trilocrab/lemmas.hpp"

#include <stdexcept>
#include <string>

namespace trilocrab {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Patch files. A non-zero level is written as "level" (super patches).
std::string patch_to_json(const Patch& p, int level = 0);
// Rejects overlaps, placements outside a CLOSED window and a different atlas hash.
Patch patch_from_json(const Atlas& a, const std::string& text, int* level = nullptr);

std::string trace_to_json(const DeductionTrace& t);
DeductionTrace trace_from_json(const std::string& text);

std::string report_to_json(const ProofReport& r, const std::string& extra_key = {}, const std::string& extra_json = {});
std::string report_to_text(const ProofReport& r);

std::string validity_to_text(const ValidityReport& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

} // namespace trilocrab
