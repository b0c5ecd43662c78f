#pragma once

#include <map>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace fslab::cli {

struct RunContext {
    RunConfig cfg;
    std::string command;
    std::string outDir;
    std::map<std::string, double> tol;
};

// Runs a command, filling report["results"] and report["verdicts"] and writing
// artifacts into ctx.outDir. Library errors propagate.
void run_command(const RunContext& ctx, json& report);

}  // namespace fslab::cli
