// nint command-line front end. Talks to the toolkit only through the C API.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nint.h"

namespace {

int fail_json(const std::string& code, const std::string& message) {
    // poor man's JSON escape: the codes are static, the message needs quoting
    std::string esc;
    for (char c : message) {
        if (c == '"' || c == '\\') esc += '\\';
        if (c == '\n') {
            esc += "\\n";
            continue;
        }
        esc += c;
    }
    std::fprintf(stderr, "{\"error\": \"%s\", \"message\": \"%s\"}\n", code.c_str(),
                 esc.c_str());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nint: news-intent annotation, modeling, and evaluation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(nint_version()));

    std::string config_path, output, seed, method, endpoint, variant;

    std::vector<CLI::App*> subs;
    for (const char* const* name = nint_subcommands(); *name; ++name) {
        CLI::App* sub = app.add_subcommand(*name);
        sub->add_option("--config", config_path, "run config JSON file");
        sub->add_option("--output", output, "output directory");
        sub->add_option("--seed", seed, "master RNG seed");
        sub->add_option("--method", method, "prompting method")
            ->check(CLI::IsMember({"standard", "direct-cot", "standard-cot", "dmg"}));
        sub->add_option("--endpoint", endpoint, "endpoint base URL or mock:<dir>");
        sub->add_option("--variant", variant, "model variant")
            ->check(CLI::IsMember({"full", "womve", "woia", "wob", "wod", "wop"}));
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);
    CLI::App* chosen = app.get_subcommands().front();

    std::string config_json;
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) return fail_json("IoError", "cannot read config file '" + config_path + "'");
        std::ostringstream body;
        body << in.rdbuf();
        config_json = body.str();
    }

    std::vector<std::string> keys, values;
    auto add = [&](const char* key, const std::string& value) {
        if (!value.empty()) {
            keys.push_back(key);
            values.push_back(value);
        }
    };
    add("output", output);
    add("seed", seed);
    add("method", method);
    add("endpoint", endpoint);
    add("variant", variant);

    std::vector<const char*> key_ptrs, value_ptrs;
    for (size_t i = 0; i < keys.size(); ++i) {
        key_ptrs.push_back(keys[i].c_str());
        value_ptrs.push_back(values[i].c_str());
    }

    int status = nint_run(chosen->get_name().c_str(), config_json.c_str(), key_ptrs.data(),
                          value_ptrs.data(), keys.size());
    if (status != NINT_OK) return fail_json(nint_last_error_code(), nint_last_error());
    return 0;
}
