#pragma once

#include "pfaffnet/io.hpp"

#include <string>
#include <vector>

namespace pfaffnet::cli {

/// Tabular report plus provenance. `conformant` false maps to exit code 1.
struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    json config;
    json summary = json::object();
    bool conformant = true;
};

struct RunOptions {
    unsigned threads = 1;
};

Report cmd_format(const json& config, const RunOptions& run);
Report cmd_bound(const json& config, const RunOptions& run);
Report cmd_verify_chain(const json& config, const RunOptions& run);
Report cmd_zeros(const json& config, const RunOptions& run);
Report cmd_betti(const json& config, const RunOptions& run);
Report cmd_rankdrop(const json& config, const RunOptions& run);

} // namespace pfaffnet::cli
