#pragma once

#include "sfde/config.hpp"

#include <exception>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sfde {

inline constexpr const char* kVersion = "0.1.0";

/// fbm, direct, ensemble, phi, reconstruct, instability
const std::vector<std::string_view>& subcommands();

/// Runs one subcommand for every model run of `cfg`, writing CSVs plus
/// `<subcommand>.meta` under cfg.out. Returns the written file names.
std::vector<std::string> run_subcommand(std::string_view subcommand, const RunConfig& cfg);

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitInput = 3,
    kExitDomain = 4,
    kExitInversion = 5,
    kExitIo = 6,
    kExitUsage = 7,
};

struct Failure {
    int code;
    std::string category;  ///< config, input, domain, inversion, io, internal
    std::string message;
};

/// Maps a caught exception onto an exit code and category.
Failure classify(std::exception_ptr e);

/// run_subcommand with failures reported as one line `error: <category>: <message>` on `err`.
int dispatch(std::string_view subcommand, const RunConfig& cfg, std::ostream& err);

}  // namespace sfde
