#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "madios/induction.hpp"

namespace madios {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitInput = 2,
    kExitGrammar = 3,
    kExitData = 4,
};

struct CommandOptions {
    std::optional<std::filesystem::path> config_path;
    // key=value assignments applied after the config file.
    std::vector<std::pair<std::string, std::string>> overrides;
    std::optional<std::size_t> max_length;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    bool exclude_null_label = false;
    bool key_value_report = false;
    std::optional<std::filesystem::path> instances_out;
    // induce always writes <grammar>.manifest.json; the others only when set.
    std::optional<std::filesystem::path> manifest_path;
};

// Record of one command run, written as JSON.
class RunManifest {
public:
    explicit RunManifest(std::string command);

    // SHA-256 of the file as it is now; "missing" when it cannot be read.
    void add_input(const std::string& role, const std::filesystem::path& path);
    void add_output(const std::string& role, const std::filesystem::path& path);
    void set_config(const std::string& key, const std::string& value);
    void record_stage(const std::string& stage, double seconds);
    void finish(int exit_code, const std::string& message);
    std::string json() const;
    void write(const std::filesystem::path& path) const;

private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> config_;
    std::vector<std::vector<std::string>> inputs_;  // role, path, digest
    std::vector<std::pair<std::string, std::string>> outputs_;
    std::vector<std::pair<std::string, double>> timings_;
    int exit_code_ = -1;
    std::string message_;
};

// Lower-case hex SHA-256 of a file. Throws IoError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

// Config file (if any) with the overrides applied, validated.
InductionConfig resolve_config(const CommandOptions& options);

int cmd_induce(const std::filesystem::path& corpus_path, const std::filesystem::path& grammar_path,
               const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_parse(const std::filesystem::path& grammar_path, const std::filesystem::path& corpus_path,
              const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_label(const std::filesystem::path& grammar_path, const std::filesystem::path& corpus_path,
              const std::filesystem::path& annotations_path, const CommandOptions& options, std::ostream& out,
              std::ostream& err);

}  // namespace madios
