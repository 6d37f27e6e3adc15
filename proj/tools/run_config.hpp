#pragma once

// The JSON run configuration and the glue that turns it into a loaded
// qft_context.  Everything here talks to the library through qfthermo.h.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qfthermo/qfthermo.h"

namespace cli {

using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kConfigError = 1, kNonConvergent = 2, kValidationFailure = 3 };

// Carries the process exit code to main.
class Failure : public std::runtime_error {
public:
    Failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

int exit_code_of(qft_status status);

// Throws Failure when status is not QFT_OK; ctx may be NULL.
void check(qft_status status, const qft_context* ctx, const std::string& what);

struct RepresentationSpec {
    std::string label;
    Json source;  // the config entry, kept for error messages
};

struct Algorithm {
    int n_max = 6;
    int s_max = 30;
    int grid_size = 10;
    double eps = 0.05;
    int max_halvings = 3;
    double root_tolerance = 1e-3;
    double census_tolerance = 1e-9;
    double convexity_tolerance = 1e-3;
    int word_cap = 14;
    double census_t = 6.0;
    int workers = 0;
};

struct ScanSpec {
    std::string label;
    qft_complex dx{0.0, 1.0}, dy{0.0, 0.0};
    double t_max = 0.4;
    int steps = 8;
};

struct MetricSpec {
    std::string base;
    qft_complex dx{1.0, 0.0}, dy{0.0, 0.0};
    std::vector<std::string> probe_words{"a", "b", "ab", "aB", "aab", "abb"};
};

struct ValidateSpec {
    int bijection_word_length = 6;
    std::optional<std::string> bijection_oracle;  // fault injection: lengths from another label
    std::vector<double> z1_scales{0.45, 0.50, 0.60};
    std::vector<int> z1_schedule{5, 10, 15, 20, 25, 30};
    std::vector<std::string> invariance{"conjugation", "swap", "ab-twist"};
    bool metric = false;
};

struct RunConfig {
    std::vector<RepresentationSpec> representations;
    Algorithm algorithm;
    std::string output_directory = ".";
    std::vector<std::string> formats{"json", "csv"};
    std::optional<std::pair<std::string, std::string>> pair;
    std::optional<ScanSpec> scan;
    std::optional<MetricSpec> metric;
    ValidateSpec validate;
};

// Parses and type-checks the document; Failure(kConfigError) on any problem.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);

// Owns a context.  Representations are registered in config order; a
// failing entry is either fatal (Failure) or recorded in `load_errors`.
class Session {
public:
    Session(const RunConfig& config, bool keep_going);
    ~Session();
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    qft_context* ctx() const { return ctx_; }
    const RunConfig& config() const { return config_; }
    bool has(const std::string& label) const;
    qft_traces traces(const std::string& label) const;
    std::vector<std::string> labels() const { return loaded_; }
    const std::vector<std::pair<std::string, std::string>>& load_errors() const { return load_errors_; }

    // The pair named on the command line ("rho,eta"), else the config pair,
    // else the first two representations (or the first one twice).
    std::pair<std::string, std::string> pair(const std::string& override_label) const;
    std::string single(const std::string& override_label) const;

private:
    void load(const RepresentationSpec& spec);

    RunConfig config_;
    qft_context* ctx_ = nullptr;
    std::vector<std::string> loaded_;
    std::vector<std::pair<std::string, std::string>> load_errors_;
};

qft_complex parse_complex(const Json& j);
std::vector<std::string> split(const std::string& s, char sep);

// 12 significant digits; non-finite values become null.
Json num(double v);
std::string csv_num(double v);

}  // namespace cli
