#pragma once

#include <map>
#include <string>
#include <vector>

#include "nint/corpus.hpp"
#include "nint/endpoint.hpp"
#include "nint/fusion.hpp"
#include "nint/model.hpp"
#include "nint/train.hpp"

namespace nint::cmd {

// Parsed run configuration: one JSON document, unknown keys rejected.
struct RunConfig {
    std::string corpus_path;
    std::string output_dir = "out";
    uint64_t seed = 0;
    Vocabulary vocab = Vocabulary::defaults();
    SplitSpec split;
    std::string method = "dmg";
    dmg::EndpointConfig endpoint;
    dmg::PromptOptions prompt;
    dmint::DmintConfig model;
    dmint::TrainConfig train;
    std::string variant = "full";
    std::string checkpoint_path;  // written by train, read by eval/fuse/attribute
    std::string ratings_path;
    std::string verification_path;
    std::string records_path;  // cost-report input
    std::map<std::string, double> scores;  // method -> macro F1, cost-report ratios
    std::string stats_group_by = "domain";

    struct Fusion {
        std::string source = "intent";           // intent | concat
        std::string task = "classification";     // classification | regression
        int hidden = 32;
        double lr = 1e-2;
        int epochs = 200;
        uint64_t seed = 3;
        std::string features_path;  // task features, jsonl
        std::string labels_path;    // {"id","label"} jsonl
    } fusion;

    std::vector<std::string> attribute_ids;     // empty = whole corpus
    std::vector<std::string> ablate_variants{"full", "womve", "woia", "wob", "wod", "wop"};
};

RunConfig parse_run_config(const std::string& json_text);

// Flag overrides; keys: output, seed, method, endpoint, variant.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

const std::vector<std::string>& command_names();

// Runs one subcommand, writing artifacts plus manifest.json under
// cfg.output_dir. Throws Error on failure.
void run_command(const std::string& name, const RunConfig& cfg);

// parse + overrides + run in one call (the C API entry point).
void run(const std::string& name, const std::string& config_json,
         const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace nint::cmd
