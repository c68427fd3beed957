#include "nint.h"

#include <cstring>
#include <string>
#include <vector>

#include "nint/agreement.hpp"
#include "nint/commands.hpp"
#include "nint/corpus.hpp"
#include "nint/error.hpp"

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_code;

int fail(int status, const std::string& code, const std::string& message) {
    g_last_code = code;
    g_last_error = message;
    return status;
}

int status_for(const std::string& code) {
    if (code == "ConfigError") return NINT_ERR_CONFIG;
    if (code == "IoError") return NINT_ERR_IO;
    return NINT_ERR_RUNTIME;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return NINT_OK;
    } catch (const nint::Error& e) {
        return fail(status_for(e.code()), e.code(), e.what());
    } catch (const std::exception& e) {
        return fail(NINT_ERR_RUNTIME, "Internal", e.what());
    }
}

}  // namespace

struct nint_corpus {
    nint::Corpus corpus;
};

extern "C" {

const char* nint_version(void) { return "1.0.0"; }

const char* nint_last_error(void) { return g_last_error.c_str(); }
const char* nint_last_error_code(void) { return g_last_code.c_str(); }

int nint_run(const char* subcommand, const char* config_json, const char* const* override_keys,
             const char* const* override_values, size_t n_overrides) {
    if (!subcommand)
        return fail(NINT_ERR_INVALID_ARG, "InvalidArgument", "subcommand is null");
    if (n_overrides > 0 && (!override_keys || !override_values))
        return fail(NINT_ERR_INVALID_ARG, "InvalidArgument", "override arrays are null");
    std::vector<std::pair<std::string, std::string>> overrides;
    for (size_t i = 0; i < n_overrides; ++i) {
        if (!override_keys[i] || !override_values[i])
            return fail(NINT_ERR_INVALID_ARG, "InvalidArgument", "override entry is null");
        overrides.emplace_back(override_keys[i], override_values[i]);
    }
    return guarded([&] {
        nint::cmd::run(subcommand, config_json ? config_json : "", overrides);
    });
}

const char* const* nint_subcommands(void) {
    static std::vector<const char*> names = [] {
        std::vector<const char*> v;
        for (const auto& n : nint::cmd::command_names()) v.push_back(n.c_str());
        v.push_back(nullptr);
        return v;
    }();
    return names.data();
}

int nint_corpus_open(const char* path, nint_corpus** out) {
    if (!path || !out)
        return fail(NINT_ERR_INVALID_ARG, "InvalidArgument", "path or out is null");
    *out = nullptr;
    return guarded([&] {
        auto handle = new nint_corpus{nint::load_corpus(path, nint::Vocabulary::defaults())};
        *out = handle;
    });
}

int nint_corpus_size(const nint_corpus* corpus, size_t* out) {
    if (!corpus || !out)
        return fail(NINT_ERR_INVALID_ARG, "InvalidArgument", "corpus or out is null");
    *out = corpus->corpus.articles.size();
    return NINT_OK;
}

int nint_corpus_article_id(const nint_corpus* corpus, size_t index, char* buf, size_t buf_len) {
    if (!corpus || !buf || buf_len == 0)
        return fail(NINT_ERR_INVALID_ARG, "InvalidArgument", "corpus or buffer is null");
    if (index >= corpus->corpus.articles.size())
        return fail(NINT_ERR_INVALID_ARG, "InvalidArgument",
                    "article index " + std::to_string(index) + " out of range");
    const std::string& id = corpus->corpus.articles[index].id;
    std::strncpy(buf, id.c_str(), buf_len - 1);
    buf[buf_len - 1] = '\0';
    return NINT_OK;
}

void nint_corpus_free(nint_corpus* corpus) { delete corpus; }

int nint_fleiss_kappa(const long* counts, size_t items, size_t categories, double* out_kappa,
                      int* out_degenerate) {
    if (!counts || !out_kappa || items == 0 || categories == 0)
        return fail(NINT_ERR_INVALID_ARG, "InvalidArgument", "bad kappa arguments");
    return guarded([&] {
        nint::RatingTable table;
        table.counts.resize(items, std::vector<long>(categories));
        long per_item = 0;
        for (size_t c = 0; c < categories; ++c) per_item += counts[c];
        table.raters_per_item = per_item;
        for (size_t i = 0; i < items; ++i)
            for (size_t c = 0; c < categories; ++c)
                table.counts[i][c] = counts[i * categories + c];
        table.validate();
        nint::KappaResult r = nint::fleiss_kappa(table);
        *out_kappa = r.value;
        if (out_degenerate) *out_degenerate = r.degenerate ? 1 : 0;
    });
}

}  // extern "C"
