#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "fslab/errors.hpp"
#include "fslab/parallel.hpp"
#include "report.hpp"

#ifndef FSLAB_GIT_DESCRIBE
#define FSLAB_GIT_DESCRIBE "unknown"
#endif

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerdict = 4;

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fslab::cli;
    const auto start = std::chrono::steady_clock::now();

    std::string command, configPath, outDir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::vector<std::string> overrides;

    CLI::App app{"Spectral free-surface resolvent laboratory"};
    app.add_option("command", command, "solve | verify-symbols | scan-nab | rbound | evolve | bent")->required();
    app.add_option("--config", configPath, "INI configuration file")->required();
    app.add_option("--out", outDir, "output directory (default: [run] out, else .)");
    app.add_option("--seed", seed, "seed for randomized commands");
    app.add_option("--threads", threads, "worker threads (0: hardware concurrency)");
    app.add_option("--tol-override", overrides, "tolerance override KEY=VAL (repeatable)");

    json report;
    report["command"] = json();
    report["configHash"] = json();
    report["gitDescribe"] = FSLAB_GIT_DESCRIBE;
    report["wallTime"] = 0.0;
    report["verdicts"] = json::array();

    auto finish = [&](int code) {
        report["wallTime"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report["exitCode"] = code;
        try {
            const std::string dir = outDir.empty() ? "." : outDir;
            std::filesystem::create_directories(dir);
            write_json_file((std::filesystem::path(dir) / "report.json").string(), report);
        } catch (const std::exception& e) {
            std::cerr << "fslab: cannot write report: " << e.what() << '\n';
        }
        return code;
    };
    auto fail = [&](int code, const std::string& kind, const std::string& message) {
        report["error"] = json{{"kind", kind}, {"message", message}};
        std::cerr << "fslab: " << kind << ": " << message << '\n';
        return finish(code);
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kExitConfig, "usage", e.what());
    }
    report["command"] = command;

    RunContext ctx;
    try {
        if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
            throw fslab::ConfigError("unknown command '" + command + "'");
        ctx.command = command;
        ctx.cfg = load_config(configPath);
        for (const auto& s : required_sections(command))
            if (!ctx.cfg.sections.count(s)) throw fslab::ConfigError("missing section [" + s + "] for " + command);
        if (seed) ctx.cfg.seed = seed;
        if (needs_seed(command) && !ctx.cfg.seed) throw fslab::ConfigError(command + " needs --seed");
        if (outDir.empty()) outDir = ctx.cfg.outDir;
        ctx.outDir = outDir;
        ctx.tol = default_tolerances(command);
        for (const auto& o : overrides) apply_override(ctx.tol, o);
        report["configHash"] = hex64(fnv1a(canonical_text(ctx.cfg, command, ctx.tol)));
        report["tolerances"] = ctx.tol;
        std::filesystem::create_directories(outDir);
        fslab::set_worker_count(threads);
    } catch (const fslab::Error& e) {
        return fail(kExitConfig, e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail(kExitConfig, "config", e.what());
    }

    try {
        run_command(ctx, report);
    } catch (const fslab::Error& e) {
        return fail(e.numerical() ? kExitNumerical : kExitConfig, e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail(kExitNumerical, "internal", e.what());
    }

    if (!all_pass(report)) {
        for (const auto& v : report["verdicts"])
            if (!v["pass"].get<bool>()) std::cerr << "fslab: verdict failed: " << v["name"].get<std::string>() << '\n';
        report["error"] = json{{"kind", "verdict"}, {"message", "one or more verdicts failed"}};
        return finish(kExitVerdict);
    }
    return finish(0);
}
