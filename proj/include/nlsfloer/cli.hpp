#pragma once

#include <string>
#include <vector>

#include "nlsfloer/io.hpp"

namespace nlsfloer {

inline constexpr const char* kToolVersion = "nls-floer 0.1.0";

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitIo = 4 };

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& what) : std::invalid_argument(path + ": " + what) {}
};

const std::vector<std::string>& pipeline_names();

// Fully populated default configuration for one pipeline.
json default_config(const std::string& pipeline);

// Overlays `user` on the defaults; unknown fields and type mismatches raise
// ConfigError naming the field path.
json resolve_config(const std::string& pipeline, const json& user);

ModelSpec model_from_config(const json& model, const std::string& path = "model");

struct RunOptions {
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
};

// Runs a pipeline on a resolved configuration, writing artifacts and the
// manifest under opts.out_dir. Returns an ExitCode.
int run_pipeline(const std::string& pipeline, const json& config, const RunOptions& opts);

int run_cli(int argc, char** argv);

}  // namespace nlsfloer
