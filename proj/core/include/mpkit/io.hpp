#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mpkit/campaign.hpp"
#include "mpkit/matrix.hpp"
#include "mpkit/tolerances.hpp"
#include "mpkit/verifier.hpp"

namespace mpkit {

using Json = nlohmann::ordered_json;

// {"rows": r, "cols": c, "entries": [[re, im], ...]} in row-major order.
// Doubles are written in shortest round-trip form, so write-then-read is
// bit-exact.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

// Parses text; syntax errors carry 1-based line/column.
Json parse_json_text(std::string_view text);

// The file is a matrix object with an optional "provenance" member.
void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m,
                       const Json& provenance = Json());
ComplexMatrix read_matrix_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

Json tolerances_to_json(const Tolerances& tol);
// Overrides only the fields present in j.
Tolerances tolerances_from_json(const Json& j, Tolerances base = {});

// {"input", "tolerance", "checks": [{"id", "residual", "threshold", "passed", "notes"}], "overall"}
Json report_to_json(const VerificationReport& report);
Json summary_to_json(const CampaignSummary& summary);

// Accepts {"sizes", "ranks" ("random" or list), "skews", "trials", "seed", "tolerance"}.
CampaignConfig campaign_from_json(const Json& j, CampaignConfig base = {});

}  // namespace mpkit
