// cli.hpp
// Batch front door: one JSON config per run, results as JSON/CSV files plus
// a manifest. The config schema is documented in docs/config.md.
#pragma once

#include "idyll/serialize.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace idyll {

struct RunOutcome {
    std::string result_file;          // name of the main JSON inside the output directory
    json payload;                     // its content
    std::vector<std::string> files;   // every file written, main JSON first
};

/// Validate `config` strictly and run it, writing results into out_dir
/// (created if needed). Throws ConfigError or NumericalError.
RunOutcome execute(const json& config, const std::filesystem::path& out_dir);

/// Full run: read the config, resolve the output directory (--output wins
/// over the config's "output"), execute, and write manifest.json (and
/// error.json on failure). Returns the process exit status 0 / 1 / 2.
int run_config_file(const std::string& config_path, const std::optional<std::string>& output,
                    std::optional<int> threads, std::ostream& log);

/// argv front end: idyll <config-path> [--output DIR] [--threads N].
int cli_main(int argc, char** argv);

}  // namespace idyll
