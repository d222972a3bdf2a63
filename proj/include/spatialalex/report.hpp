// Machine-readable run reports shared by the CLI commands.
#pragma once

#include <string>

#include "json.hpp"

namespace salex {

std::string sha256_hex(const std::string& data);

// Schema-1 report envelope; identical inputs and flags must serialize to
// identical bytes, so timing never goes into the JSON payload.
nlohmann::json make_report(const std::string& command, const std::string& input_digest,
                           nlohmann::json result, nlohmann::json oracles = nlohmann::json::array());

}  // namespace salex
