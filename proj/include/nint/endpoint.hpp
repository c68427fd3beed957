#pragma once

#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "nint/corpus.hpp"
#include "nint/prompt.hpp"

namespace nint::dmg {

struct EndpointConfig {
    // "http(s)://host[:port]/path" for a chat-completion endpoint, or
    // "mock:<directory>" to replay canned responses from files named
    // "<article_id>.txt" ("<article_id>.q2.txt" for a second query).
    std::string base_url;
    std::string model_name = "default";
    std::string auth_env;  // name of the env var holding the bearer token
    double timeout_s = 30.0;
    int max_retries = 3;
    int max_in_flight = 4;
    double temperature = 0.0;
    std::string cache_dir;  // empty disables the response cache
};

struct LlmReply {
    std::string text;
    long prompt_tokens = -1;      // -1: endpoint reported no usage
    long completion_tokens = -1;
    bool from_cache = false;
};

class LlmEndpoint {
public:
    explicit LlmEndpoint(EndpointConfig cfg);

    // `hint` routes mock replies to their fixture file; the cache key is
    // hash(model_name, prompt) only. Throws EndpointError after retries.
    LlmReply complete(const std::string& prompt, const std::string& hint);

    long network_calls() const;
    const EndpointConfig& config() const { return cfg_; }

    static std::string cache_key(const std::string& model_name, const std::string& prompt);

private:
    LlmReply fetch(const std::string& prompt, const std::string& hint);

    EndpointConfig cfg_;
    mutable std::mutex mu_;
    long calls_ = 0;
};

struct PipelineResult {
    // one entry per article, in corpus order
    std::vector<std::pair<std::string, ParsedResponse>> responses;
    std::vector<CostRecord> records;
};

// One annotation attempt per article with bounded-parallel requests; parse
// failures are recorded per slot, never dropped.
PipelineResult run_pipeline(const Corpus& corpus, LlmEndpoint& endpoint, Method method,
                            const PromptOptions& opts = {});

}  // namespace nint::dmg
