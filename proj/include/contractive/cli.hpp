#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "contractive/mapping.hpp"

namespace contractive::cli {

inline constexpr const char* kVersion = "0.1.0";
/// Directory for reports when --out is not given.
inline constexpr const char* kOutDirEnv = "CONTRACTIVE_OUT_DIR";

struct Command {
    std::string verb;
    /// corpus:NAME or a mapping spec path. Empty for `corpus`.
    std::string target;
    std::map<std::string, std::string> options;
    /// Arguments as given, echoed in the report.
    std::vector<std::string> args;
};

/// Thrown by parse_command for --help; carries the help text.
struct HelpRequested {
    std::string text;
};

/// Throws PreconditionError on unknown verbs, flags, or missing required flags.
Command parse_command(const std::vector<std::string>& args);

/// corpus:NAME or a spec file.
Mapping load_mapping(const std::string& target);

struct RunResult {
    int exit_code = 0;
    /// Full report text including the trailing wall-clock line.
    std::string report;
};

/// Runs the command, writes the report to stdout and to the output path, and maps errors to
/// exit codes: 1 for input or precondition errors, 2 for internal invariant violations.
RunResult execute(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse_command + execute, with CLI errors mapped to exit 1 and --help to exit 0.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The report without its wall-clock line.
std::string report_body(const std::string& report);

}  // namespace contractive::cli
