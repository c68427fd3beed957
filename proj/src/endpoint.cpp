#include "nint/endpoint.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nint/error.hpp"

namespace nint::dmg {

namespace fs = std::filesystem;
using nlohmann::json;

LlmEndpoint::LlmEndpoint(EndpointConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty())
        throw Error("ConfigError", "endpoint base_url is empty");
    if (!cfg_.cache_dir.empty()) fs::create_directories(cfg_.cache_dir);
}

std::string LlmEndpoint::cache_key(const std::string& model_name, const std::string& prompt) {
    std::string payload = model_name + "\n" + prompt;
    uint64_t a = fnv1a64(payload);
    uint64_t b = fnv1a64(payload, 0x9e3779b97f4a7c15ULL);
    char buf[36];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                  static_cast<unsigned long long>(b));
    return buf;
}

long LlmEndpoint::network_calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
}

namespace {

struct CachedReply {
    std::string text;
    long prompt_tokens = -1;
    long completion_tokens = -1;
};

std::optional<CachedReply> read_cache(const fs::path& file) {
    std::ifstream in(file);
    if (!in) return std::nullopt;
    std::ostringstream body;
    body << in.rdbuf();
    try {
        json j = json::parse(body.str());
        CachedReply r;
        r.text = j.at("text").get<std::string>();
        r.prompt_tokens = j.value("prompt_tokens", -1L);
        r.completion_tokens = j.value("completion_tokens", -1L);
        return r;
    } catch (const json::exception& e) {
        throw Error("CacheError", "corrupt cache entry '" + file.string() + "': " + e.what());
    }
}

void write_cache(const fs::path& file, const CachedReply& r) {
    json j{{"text", r.text},
           {"prompt_tokens", r.prompt_tokens},
           {"completion_tokens", r.completion_tokens}};
    fs::path tmp = file;
    tmp += ".tmp";
    std::ofstream out(tmp);
    out << j.dump();
    out.close();
    fs::rename(tmp, file);
}

// split "http://host:port/path" into client base and path
std::pair<std::string, std::string> split_url(const std::string& url) {
    size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        throw Error("ConfigError", "malformed endpoint url '" + url + "'");
    size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

}  // namespace

LlmReply LlmEndpoint::fetch(const std::string& prompt, const std::string& hint) {
    if (cfg_.base_url.rfind("mock:", 0) == 0) {
        fs::path file = fs::path(cfg_.base_url.substr(5)) / (hint + ".txt");
        std::ifstream in(file);
        if (!in)
            throw Error("EndpointError", "mock endpoint has no reply file '" + file.string() + "'");
        std::ostringstream body;
        body << in.rdbuf();
        LlmReply r;
        r.text = body.str();
        return r;
    }

    auto [base, path] = split_url(cfg_.base_url);
    json payload{{"model", cfg_.model_name},
                 {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                 {"temperature", cfg_.temperature}};
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(250L << (attempt - 1)));
        httplib::Client client(base);
        client.set_read_timeout(std::chrono::milliseconds(
            static_cast<long>(cfg_.timeout_s * 1000.0)));
        httplib::Headers headers;
        if (!cfg_.auth_env.empty()) {
            const char* token = std::getenv(cfg_.auth_env.c_str());
            if (!token)
                throw Error("ConfigError",
                            "auth environment variable '" + cfg_.auth_env + "' is not set");
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
        auto res = client.Post(path, headers, payload.dump(), "application/json");
        if (!res) {
            last_error = "transport error " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw Error("EndpointError",
                        "endpoint returned status " + std::to_string(res->status));
        try {
            json j = json::parse(res->body);
            LlmReply r;
            r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            if (j.contains("usage")) {
                r.prompt_tokens = j["usage"].value("prompt_tokens", -1L);
                r.completion_tokens = j["usage"].value("completion_tokens", -1L);
            }
            return r;
        } catch (const json::exception& e) {
            throw Error("EndpointError", std::string("malformed endpoint response: ") + e.what());
        }
    }
    throw Error("EndpointError", "endpoint failed after " + std::to_string(cfg_.max_retries + 1) +
                                     " attempts: " + last_error);
}

LlmReply LlmEndpoint::complete(const std::string& prompt, const std::string& hint) {
    fs::path cache_file;
    if (!cfg_.cache_dir.empty()) {
        cache_file = fs::path(cfg_.cache_dir) / (cache_key(cfg_.model_name, prompt) + ".json");
        std::lock_guard<std::mutex> lock(mu_);
        if (auto hit = read_cache(cache_file)) {
            LlmReply r;
            r.text = hit->text;
            r.prompt_tokens = hit->prompt_tokens;
            r.completion_tokens = hit->completion_tokens;
            r.from_cache = true;
            return r;
        }
    }
    LlmReply r = fetch(prompt, hint);
    {
        std::lock_guard<std::mutex> lock(mu_);
        ++calls_;
        if (!cache_file.empty())
            write_cache(cache_file, {r.text, r.prompt_tokens, r.completion_tokens});
    }
    return r;
}

PipelineResult run_pipeline(const Corpus& corpus, LlmEndpoint& endpoint, Method method,
                            const PromptOptions& opts) {
    const size_t n = corpus.articles.size();
    PipelineResult result;
    result.responses.resize(n);
    result.records.resize(n);

    std::atomic<size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard<std::mutex> lock(err_mu);
                if (first_error) return;
            }
            try {
                const NewsArticle& a = corpus.articles[i];
                PromptBundle bundle = build_prompt(a, method, corpus.vocab, opts);
                CostRecord rec;
                rec.method = method;
                rec.article_id = a.id;
                std::string final_text;
                std::string transcript;
                for (size_t q = 0; q < bundle.text_blocks.size(); ++q) {
                    std::string prompt = transcript.empty()
                                             ? bundle.text_blocks[q]
                                             : transcript + "\n\n" + bundle.text_blocks[q];
                    std::string hint = q == 0 ? a.id : a.id + ".q" + std::to_string(q + 1);
                    LlmReply reply = endpoint.complete(prompt, hint);
                    ++rec.queries;
                    rec.prompt_tokens +=
                        reply.prompt_tokens >= 0
                            ? reply.prompt_tokens
                            : static_cast<long>(whitespace_token_count(prompt));
                    rec.completion_tokens +=
                        reply.completion_tokens >= 0
                            ? reply.completion_tokens
                            : static_cast<long>(whitespace_token_count(reply.text));
                    transcript = prompt + "\n\n" + reply.text;
                    final_text = reply.text;
                }
                ParsedResponse parsed = parse_response(final_text, bundle.slots, corpus.vocab);
                parsed.annotation.annotator_id = endpoint.config().model_name;
                rec.parsed_ok = parsed.complete();
                result.responses[i] = {a.id, std::move(parsed)};
                result.records[i] = rec;
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    size_t workers = std::min<size_t>(std::max(1, endpoint.config().max_in_flight), n);
    std::vector<std::thread> pool;
    for (size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

}  // namespace nint::dmg
