#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "monoterm/ctrs.hpp"
#include "monoterm/dp.hpp"
#include "monoterm/parser.hpp"
#include "monoterm/polyinterp.hpp"
#include "monoterm/smt.hpp"

using namespace monoterm;

namespace {

constexpr int kExitProved = 0;
constexpr int kExitUnknown = 1;
constexpr int kExitInputError = 2;

struct CommonOptions {
    std::string strategy;
    double timeout_secs = 300.0;
    std::string solver_cmd = "z3 -in";
    std::string emit_smt;
    bool json = false;
    int max_iterations = 64;
};

void add_common_flags(CLI::App& cmd, CommonOptions& opts) {
    cmd.add_option("--timeout-secs", opts.timeout_secs, "Solver wall-clock budget per check");
    cmd.add_option("--solver-cmd", opts.solver_cmd, "SMT-LIB2 solver command reading stdin");
    cmd.add_option("--emit-smt", opts.emit_smt, "Persist every solver script into this directory");
    cmd.add_flag("--json", opts.json, "Structured report on stdout instead of text");
    cmd.add_option("--max-iterations", opts.max_iterations,
                   "Processor application budget for the framework");
}

std::shared_ptr<PiServices> make_services(const CommonOptions& opts) {
    smt::SolverConfig config;
    config.command = opts.solver_cmd;
    config.timeout_secs = opts.timeout_secs;
    if (!opts.emit_smt.empty()) {
        std::filesystem::create_directories(opts.emit_smt);
        config.dump_dir = opts.emit_smt;
    }
    return std::make_shared<PiServices>(config);
}

CtrsDocument load_document(const std::string& path) {
    auto parsed = parse_ctrs_file(path);
    if (!parsed.ok()) {
        std::string message = "cannot load '" + path + "'";
        for (const auto& diagnostic : parsed.diagnostics)
            message += "\n  " + to_string(diagnostic);
        throw std::runtime_error(message);
    }
    return *parsed.document;
}

void require_local_soundness(const ConstrainedTRS& trs, PiServices& services,
                             const std::string& path) {
    auto report = check_local_soundness(trs, services.oracle);
    if (report.status == SoundnessStatus::Ok) return;
    std::string message = report.status == SoundnessStatus::Failed
                              ? "'" + path + "' is not locally sound"
                              : "local soundness of '" + path + "' could not be verified";
    for (const auto& issue : report.issues) message += "\n  " + issue;
    throw std::runtime_error(message);
}

nlohmann::json stats_json(const FrameworkResult& result, const PiServices& services) {
    nlohmann::json stats;
    stats["synthesis_checks"] = services.checks_issued;
    stats["validity_solver_calls"] = services.oracle.solver_calls();
    auto attempts = nlohmann::json::array();
    for (const auto& attempt : result.attempts) {
        nlohmann::json a;
        a["processor"] = attempt.justification.processor + attempt.justification.variant;
        a["progressed"] = attempt.progressed;
        if (!attempt.justification.solver_status.empty())
            a["solver_status"] = attempt.justification.solver_status;
        if (attempt.justification.solver_seconds)
            a["solver_seconds"] = *attempt.justification.solver_seconds;
        attempts.push_back(a);
    }
    stats["attempts"] = attempts;
    return stats;
}

int run_prove(const std::string& file, const std::string& pin_model,
              const CommonOptions& opts) {
    auto services = make_services(opts);
    if (!pin_model.empty()) services->pinned = load_pinned_models(pin_model);

    CtrsDocument document = load_document(file);
    require_local_soundness(document.trs, *services, file);

    Strategy strategy = build_strategy(opts.strategy, services);
    FrameworkResult result = run_framework(document.trs, strategy, opts.max_iterations);

    if (opts.json) {
        nlohmann::json report;
        report["file"] = std::filesystem::path(file).filename().string();
        report["verdict"] = to_string(result.verdict);
        report["report"] = to_json(result);
        report["stats"] = stats_json(result, *services);
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << to_text(result);
        std::cout << "synthesis checks: " << services->checks_issued << "\n";
        std::cout << "validity solver calls: " << services->oracle.solver_calls() << "\n";
    }
    return result.proved() ? kExitProved : kExitUnknown;
}

int run_corpus(const std::string& directory, const CommonOptions& opts) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory))
        if (entry.path().extension() == ".ctrs") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<std::string> columns = {"legacy", "pi:gt-ge-ge", "pi:lt-ge-le", "pi:gt-le-le",
                                        "pi:lt-le-ge"};
    nlohmann::json expected;
    auto expected_path = std::filesystem::path(directory) / "expected.json";
    if (std::filesystem::exists(expected_path)) {
        std::ifstream in(expected_path);
        try {
            expected = nlohmann::json::parse(in);
        } catch (const std::exception& error) {
            throw std::runtime_error("cannot parse '" + expected_path.string() +
                                     "': " + error.what());
        }
        if (expected.contains("columns"))
            columns = expected["columns"].get<std::vector<std::string>>();
    }

    std::map<std::string, std::map<std::string, std::string>> verdicts;
    nlohmann::json mismatches = nlohmann::json::array();
    for (const auto& file : files) {
        std::string name = file.stem().string();
        std::string failure;
        std::optional<CtrsDocument> document;
        try {
            document = load_document(file.string());
            auto gate = make_services(opts);
            require_local_soundness(document->trs, *gate, file.string());
        } catch (const std::exception& error) {
            failure = error.what();
        }
        for (const auto& column : columns) {
            std::string verdict = "input-error";
            if (document && failure.empty()) {
                auto services = make_services(opts);
                Strategy strategy = build_strategy("scc," + column, services);
                FrameworkResult result =
                    run_framework(document->trs, strategy, opts.max_iterations);
                verdict = to_string(result.verdict);
            }
            verdicts[name][column] = verdict;
            if (expected.contains("systems") && expected["systems"].contains(name) &&
                expected["systems"][name].contains(column)) {
                std::string want = expected["systems"][name][column].get<std::string>();
                if (want != verdict)
                    mismatches.push_back({{"system", name},
                                          {"column", column},
                                          {"got", verdict},
                                          {"expected", want}});
            }
        }
        if (!failure.empty()) std::cerr << failure << "\n";
    }

    if (opts.json) {
        nlohmann::json report;
        report["columns"] = columns;
        nlohmann::json systems = nlohmann::json::object();
        for (const auto& [name, row] : verdicts) {
            nlohmann::json cells = nlohmann::json::object();
            for (const auto& [column, verdict] : row) cells[column] = verdict;
            systems[name] = cells;
        }
        report["systems"] = systems;
        report["mismatches"] = mismatches;
        std::cout << report.dump(2) << "\n";
    } else {
        for (const auto& [name, row] : verdicts) {
            std::cout << name << ":";
            for (const auto& column : columns) std::cout << " " << column << "=" << row.at(column);
            std::cout << "\n";
        }
        if (mismatches.empty()) {
            std::cout << "all " << verdicts.size() * columns.size()
                      << " cells match the expected table\n";
        } else {
            std::cout << mismatches.size() << " mismatches:\n";
            for (const auto& miss : mismatches)
                std::cout << "  " << miss["system"].get<std::string>() << " x "
                          << miss["column"].get<std::string>() << ": got "
                          << miss["got"].get<std::string>() << ", expected "
                          << miss["expected"].get<std::string>() << "\n";
        }
    }
    return mismatches.empty() ? kExitProved : kExitUnknown;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Termination prover for constrained rewrite systems over the integers"};
    app.require_subcommand(1);

    CommonOptions prove_opts;
    prove_opts.strategy = default_strategy_tokens();
    std::string file;
    std::string pin_model;
    auto* prove = app.add_subcommand("prove", "Prove termination of one system");
    prove->add_option("file", file, "System in the .ctrs format")->required();
    prove->add_option("--strategy", prove_opts.strategy,
                      "Comma-separated processors applied first-match");
    prove->add_option("--pin-model", pin_model,
                      "Replay interpretations from this JSON file instead of solving");
    add_common_flags(*prove, prove_opts);

    CommonOptions corpus_opts;
    std::string directory;
    auto* corpus = app.add_subcommand("corpus", "Run the benchmark matrix of a directory");
    corpus->add_option("directory", directory, "Directory of .ctrs files and expected.json")
        ->required();
    add_common_flags(*corpus, corpus_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        int code = app.exit(error);
        return code == 0 ? 0 : kExitInputError;
    }

    try {
        if (prove->parsed()) return run_prove(file, pin_model, prove_opts);
        return run_corpus(directory, corpus_opts);
    } catch (const smt::ProtocolError& error) {
        std::cerr << "solver error: " << error.what() << "\n"
                  << "install the solver or point --solver-cmd at an SMT-LIB2 solver reading "
                     "stdin\n";
        return kExitInputError;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitInputError;
    }
}
