#pragma once

#include <string>

#include "run_config.hpp"

namespace cli {

struct Invocation {
    std::string config_path;
    std::string label;       // empty: use the config's choice
    std::string out_dir;     // empty: output.directory
};

// Each returns the process exit code; Failure carries config and numerical errors.
int cmd_entropy(const Invocation& inv);
int cmd_manhattan(const Invocation& inv);
int cmd_intersect(const Invocation& inv);
int cmd_metric(const Invocation& inv);
int cmd_scan(const Invocation& inv);
int cmd_census(const Invocation& inv);
int cmd_validate(const Invocation& inv);

}  // namespace cli
