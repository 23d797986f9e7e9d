#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "leanopt/gateway.hpp"

namespace leanopt {

// Domain failure inside a command; maps to exit code 1.
struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration (file or environment); maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Backend and pipeline configuration. The remote bearer token is never a
// config key: it is read from the LEAN_OPT_API_KEY environment variable only.
struct Config {
    std::string backend = "scripted";  // "scripted" or "remote"
    std::string endpoint;
    std::string model;
    int timeout_seconds = 60;
    int max_steps = 6;
    std::string refdata = "data/refdata";
    std::string prompts = "data/prompts";
    std::string transcript;  // scripted replies (JSON array or id-keyed object)
};

// Key-value file: one `key = value` per line, '#' comments, unknown keys are
// errors, credential-looking keys are rejected outright.
Config load_config(const std::string& path);

// LEAN_OPT_BACKEND, LEAN_OPT_ENDPOINT, LEAN_OPT_MODEL, LEAN_OPT_REFDATA,
// LEAN_OPT_PROMPTS, LEAN_OPT_TRANSCRIPT override file values when set.
void apply_env_overrides(Config& config);

// Replies for one scripted run: the file is either a flat JSON array of
// strings, or an object mapping run ids to arrays (`id` selects one).
std::vector<std::string> load_replies(const std::string& path, const std::string& id);

// Builds the configured backend; for scripted runs the replies come from the
// transcript file under `id`.
std::unique_ptr<ChatBackend> make_backend(const Config& config, const std::string& id);

// Entry point behind main(): parses args (without the program name) and runs
// one subcommand. Exit codes: 0 success, 1 domain failure, 2 usage/config.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace leanopt
