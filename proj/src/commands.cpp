#include "nint/commands.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nint/agreement.hpp"
#include "nint/analysis.hpp"
#include "nint/attribution.hpp"
#include "nint/error.hpp"
#include "nint/metrics.hpp"
#include "nint/prompt.hpp"

namespace nint::cmd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw config_error(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end())
            throw config_error("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_split(const json& j, SplitSpec& spec) {
    check_keys(j, {"train", "val", "test", "mode", "seed"}, "split");
    read_field(j, "train", spec.train_frac);
    read_field(j, "val", spec.val_frac);
    read_field(j, "test", spec.test_frac);
    read_field(j, "seed", spec.seed);
    if (j.contains("mode")) {
        std::string mode = j.at("mode").get<std::string>();
        if (mode == "temporal") spec.mode = SplitMode::Temporal;
        else if (mode == "random") spec.mode = SplitMode::Random;
        else throw config_error("split.mode must be 'temporal' or 'random'");
    }
}

void parse_endpoint(const json& j, dmg::EndpointConfig& ep) {
    check_keys(j,
               {"base_url", "model_name", "auth_env", "timeout_s", "max_retries",
                "max_in_flight", "temperature", "cache_dir"},
               "endpoint");
    read_field(j, "base_url", ep.base_url);
    read_field(j, "model_name", ep.model_name);
    read_field(j, "auth_env", ep.auth_env);
    read_field(j, "timeout_s", ep.timeout_s);
    read_field(j, "max_retries", ep.max_retries);
    read_field(j, "max_in_flight", ep.max_in_flight);
    read_field(j, "temperature", ep.temperature);
    read_field(j, "cache_dir", ep.cache_dir);
}

void parse_model(const json& j, dmint::DmintConfig& m) {
    check_keys(j,
               {"encoder", "buckets", "embedding_dim", "table_file", "encoder_seed", "d_int",
                "heads", "hidden", "kernels", "channels", "max_tokens", "init_seed"},
               "model");
    if (j.contains("encoder")) {
        std::string enc = j.at("encoder").get<std::string>();
        if (enc == "hashed") m.encoder.kind = dmint::EncoderKind::HashedNGram;
        else if (enc == "pretrained") m.encoder.kind = dmint::EncoderKind::PretrainedTable;
        else throw config_error("model.encoder must be 'hashed' or 'pretrained'");
    }
    read_field(j, "buckets", m.encoder.buckets);
    read_field(j, "embedding_dim", m.encoder.d);
    read_field(j, "table_file", m.encoder.table_file);
    read_field(j, "encoder_seed", m.encoder.seed);
    read_field(j, "d_int", m.d_int);
    read_field(j, "heads", m.heads);
    read_field(j, "hidden", m.hidden);
    read_field(j, "kernels", m.kernels);
    read_field(j, "channels", m.channels);
    read_field(j, "max_tokens", m.max_tokens);
    read_field(j, "init_seed", m.init_seed);
}

void parse_train(const json& j, dmint::TrainConfig& t) {
    check_keys(j, {"lr", "batch", "epochs", "seed", "patience"}, "train");
    read_field(j, "lr", t.lr);
    read_field(j, "batch", t.batch);
    read_field(j, "epochs", t.epochs);
    read_field(j, "seed", t.seed);
    read_field(j, "patience", t.patience);
}

void parse_fusion(const json& j, RunConfig::Fusion& f) {
    check_keys(j, {"source", "task", "hidden", "lr", "epochs", "seed", "features", "labels"},
               "fusion");
    read_field(j, "source", f.source);
    read_field(j, "task", f.task);
    read_field(j, "hidden", f.hidden);
    read_field(j, "lr", f.lr);
    read_field(j, "epochs", f.epochs);
    read_field(j, "seed", f.seed);
    read_field(j, "features", f.features_path);
    read_field(j, "labels", f.labels_path);
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j,
               {"corpus", "output_dir", "seed", "vocabulary", "split", "method", "endpoint",
                "prompt", "model", "train", "variant", "checkpoint", "ratings", "verification",
                "records", "scores", "stats_group_by", "fusion", "attribute_ids",
                "ablate_variants"},
               "config");
    RunConfig cfg;
    read_field(j, "corpus", cfg.corpus_path);
    read_field(j, "output_dir", cfg.output_dir);
    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<uint64_t>();
        cfg.split.seed = cfg.seed;
        cfg.train.seed = cfg.seed;
        cfg.fusion.seed = cfg.seed;
    }
    if (j.contains("vocabulary")) {
        const json& v = j.at("vocabulary");
        check_keys(v, {"frames", "emotions"}, "vocabulary");
        read_field(v, "frames", cfg.vocab.frame_names);
        read_field(v, "emotions", cfg.vocab.emotion_names);
        cfg.vocab.validate();
    }
    if (j.contains("split")) parse_split(j.at("split"), cfg.split);
    read_field(j, "method", cfg.method);
    if (j.contains("endpoint")) parse_endpoint(j.at("endpoint"), cfg.endpoint);
    if (j.contains("prompt")) {
        check_keys(j.at("prompt"), {"budget_tokens"}, "prompt");
        read_field(j.at("prompt"), "budget_tokens", cfg.prompt.budget_tokens);
    }
    if (j.contains("model")) parse_model(j.at("model"), cfg.model);
    if (j.contains("train")) parse_train(j.at("train"), cfg.train);
    read_field(j, "variant", cfg.variant);
    read_field(j, "checkpoint", cfg.checkpoint_path);
    read_field(j, "ratings", cfg.ratings_path);
    read_field(j, "verification", cfg.verification_path);
    read_field(j, "records", cfg.records_path);
    if (j.contains("scores"))
        cfg.scores = j.at("scores").get<std::map<std::string, double>>();
    read_field(j, "stats_group_by", cfg.stats_group_by);
    if (j.contains("fusion")) parse_fusion(j.at("fusion"), cfg.fusion);
    read_field(j, "attribute_ids", cfg.attribute_ids);
    read_field(j, "ablate_variants", cfg.ablate_variants);
    return cfg;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "output") {
        cfg.output_dir = value;
    } else if (key == "seed") {
        try {
            cfg.seed = std::stoull(value);
        } catch (const std::exception&) {
            throw config_error("--seed must be an unsigned integer, got '" + value + "'");
        }
        cfg.split.seed = cfg.seed;
        cfg.train.seed = cfg.seed;
        cfg.fusion.seed = cfg.seed;
    } else if (key == "method") {
        dmg::method_from_name(value);  // validates
        cfg.method = value;
    } else if (key == "endpoint") {
        cfg.endpoint.base_url = value;
    } else if (key == "variant") {
        dmint::variant_from_name(value);  // validates
        cfg.variant = value;
    } else {
        throw config_error("unknown override '" + key + "'");
    }
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {
        "validate", "split",  "stats", "annotate", "agree",     "verify",     "train",
        "eval",     "ablate", "fuse",  "attribute", "analyze",  "cost-report"};
    return names;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read '" + path + "'");
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IoError", "cannot write '" + path.string() + "'");
    out << text;
}

std::string iso_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string file_hash_hex(const std::string& path) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(read_file(path))));
    return buf;
}

struct Run {
    const RunConfig& cfg;
    std::string command;
    json manifest_inputs = json::object();

    Run(const RunConfig& c, std::string name) : cfg(c), command(std::move(name)) {
        fs::create_directories(cfg.output_dir);
    }

    fs::path out(const std::string& name) const { return fs::path(cfg.output_dir) / name; }

    void note_input(const std::string& path) {
        if (!path.empty()) manifest_inputs[path] = file_hash_hex(path);
    }

    Corpus corpus() {
        if (cfg.corpus_path.empty()) throw config_error("config has no 'corpus' path");
        note_input(cfg.corpus_path);
        return load_corpus(cfg.corpus_path, cfg.vocab);
    }

    void manifest(const json& extra = json::object()) const {
        json m{{"command", command},
               {"timestamp", iso_timestamp()},
               {"seed", cfg.seed},
               {"method", cfg.method},
               {"variant", cfg.variant},
               {"inputs", manifest_inputs},
               {"outputs", extra}};
        write_file(out("manifest.json"), m.dump(2) + "\n");
    }
};

dmint::DmintConfig model_config(const RunConfig& cfg) {
    return dmint::ablate(cfg.model, dmint::variant_from_name(cfg.variant));
}

std::string checkpoint_path(const Run& run) {
    return run.cfg.checkpoint_path.empty() ? run.out("checkpoint.json").string()
                                           : run.cfg.checkpoint_path;
}

dmint::ModelGraph load_graph(Run& run) {
    std::string path = checkpoint_path(run);
    run.note_input(path);
    uint64_t vocab_hash = 0;
    dmint::ModelGraph g = dmint::load_checkpoint(path, &vocab_hash);
    if (vocab_hash != run.cfg.vocab.content_hash())
        throw config_error("checkpoint '" + path + "' was trained with a different vocabulary");
    return g;
}

// ---- subcommands ---------------------------------------------------------

void cmd_validate(Run& run) {
    Corpus c = run.corpus();
    size_t posts = 0, labeled = 0;
    for (const auto& a : c.articles) {
        posts += a.social.posts.size();
        if (!a.annotations.empty()) ++labeled;
    }
    json report{{"articles", c.articles.size()}, {"labeled", labeled}, {"posts", posts},
                {"ok", true}};
    write_file(run.out("validation.json"), report.dump(2) + "\n");
    run.manifest({{"validation", "validation.json"}});
}

void cmd_split(Run& run) {
    Corpus c = run.corpus();
    SplitResult r = split_corpus(c, run.cfg.split);
    save_corpus(r.train, run.out("train.jsonl").string());
    save_corpus(r.val, run.out("val.jsonl").string());
    save_corpus(r.test, run.out("test.jsonl").string());
    run.manifest({{"train", r.train.articles.size()},
                  {"val", r.val.articles.size()},
                  {"test", r.test.articles.size()}});
}

void cmd_stats(Run& run) {
    Corpus c = run.corpus();
    auto rows = corpus_stats(c, run.cfg.stats_group_by);
    write_file(run.out("stats.csv"), stats_to_csv(rows, run.cfg.stats_group_by));
    run.manifest({{"stats", "stats.csv"}});
}

void cmd_annotate(Run& run) {
    Corpus c = run.corpus();
    dmg::LlmEndpoint endpoint(run.cfg.endpoint);
    dmg::Method method = dmg::method_from_name(run.cfg.method);
    dmg::PipelineResult r = dmg::run_pipeline(c, endpoint, method, run.cfg.prompt);

    std::ostringstream annotations, failures, records;
    for (size_t i = 0; i < c.articles.size(); ++i) {
        NewsArticle a = c.articles[i];
        a.annotations = {r.responses[i].second.annotation};
        annotations << article_to_json(a, c.vocab) << "\n";
        for (Slot slot : r.responses[i].second.failed_slots())
            failures << json{{"article_id", a.id},
                             {"slot", slot_name(slot)},
                             {"error", r.responses[i].second.errors.at(slot)}}
                            .dump()
                     << "\n";
    }
    for (const auto& rec : r.records)
        records << json{{"method", dmg::method_name(rec.method)},
                        {"article_id", rec.article_id},
                        {"queries", rec.queries},
                        {"prompt_tokens", rec.prompt_tokens},
                        {"completion_tokens", rec.completion_tokens},
                        {"parsed_ok", rec.parsed_ok}}
                       .dump()
                << "\n";
    write_file(run.out("annotations.jsonl"), annotations.str());
    write_file(run.out("failures.jsonl"), failures.str());
    write_file(run.out("cost_records.jsonl"), records.str());
    run.manifest({{"annotations", "annotations.jsonl"},
                  {"failures", "failures.jsonl"},
                  {"cost_records", "cost_records.jsonl"},
                  {"network_calls", endpoint.network_calls()}});
}

void cmd_agree(Run& run) {
    if (run.cfg.ratings_path.empty()) throw config_error("config has no 'ratings' path");
    run.note_input(run.cfg.ratings_path);
    RatingTable table = RatingTable::from_csv(read_file(run.cfg.ratings_path));
    KappaResult k = fleiss_kappa(table);
    json report{{"items", table.items()},
                {"raters_per_item", table.raters_per_item},
                {"fleiss_kappa", k.value},
                {"degenerate", k.degenerate},
                {"free_marginal_kappa", free_marginal_kappa(table)},
                {"pairwise_agreement", pairwise_agreement(table)},
                {"interpretation", kappa_interpretation(k.value)}};
    write_file(run.out("agreement.json"), report.dump(2) + "\n");
    run.manifest({{"agreement", "agreement.json"}});
}

void cmd_verify(Run& run) {
    if (run.cfg.verification_path.empty())
        throw config_error("config has no 'verification' path");
    run.note_input(run.cfg.verification_path);
    // CSV: dimension,item_id,vote,vote,vote[,...]   votes are 0/1
    std::map<std::string, std::vector<VerificationItem>> by_dim;
    std::vector<std::string> order;
    std::istringstream in(read_file(run.cfg.verification_path));
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream cells(line);
        std::string dim, id, cell;
        if (!std::getline(cells, dim, ',') || !std::getline(cells, id, ','))
            throw parse_error(lineno, "expected 'dimension,item_id,votes...'");
        VerificationItem item;
        item.item_id = id;
        while (std::getline(cells, cell, ',')) {
            if (cell == "1") item.votes.push_back(true);
            else if (cell == "0") item.votes.push_back(false);
            else throw parse_error(lineno, "votes must be 0 or 1, got '" + cell + "'");
        }
        if (!by_dim.count(dim)) order.push_back(dim);
        by_dim[dim].push_back(std::move(item));
    }
    std::vector<VerificationRow> rows;
    for (const auto& dim : order) rows.push_back(verification_stats(dim, by_dim[dim]));
    write_file(run.out("verification.csv"), verification_to_csv(rows));
    run.manifest({{"verification", "verification.csv"}});
}

void cmd_train(Run& run) {
    Corpus c = run.corpus();
    SplitResult split = split_corpus(c, run.cfg.split);
    dmint::ModelGraph g = dmint::ModelGraph::init(model_config(run.cfg));
    dmint::TrainConfig tc = run.cfg.train;
    tc.checkpoint_path = checkpoint_path(run);
    dmint::TrainResult r =
        dmint::train(std::move(g), split.train, split.val, tc, run.cfg.vocab.content_hash());
    std::ostringstream history;
    history << "epoch,train_loss,val_polarity_macro_f1\n";
    char buf[64];
    for (const auto& e : r.history) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f", e.epoch, e.train_loss,
                      e.val_polarity_macro_f1);
        history << buf << "\n";
    }
    write_file(run.out("history.csv"), history.str());
    run.manifest({{"checkpoint", tc.checkpoint_path},
                  {"history", "history.csv"},
                  {"best_epoch", r.best_epoch},
                  {"best_val_polarity_macro_f1", r.best_val_f1}});
}

struct TaskScores {
    double macro_f1 = 0.0, accuracy = 0.0;
};

std::map<std::string, TaskScores> evaluate_graph(const dmint::ModelGraph& g, const Corpus& c) {
    std::vector<int> belief_p, belief_g, plan_p, plan_g, pol_p, pol_g;
    std::array<std::vector<int>, 4> des_p, des_g;
    for (const auto& a : c.articles) {
        if (a.annotations.empty()) continue;
        dmint::Prediction p = dmint::predict(g, a);
        const IntentAnnotation& gold = a.annotations.front();
        belief_p.push_back(p.belief);
        belief_g.push_back(static_cast<int>(gold.belief.stance));
        plan_p.push_back(p.plan);
        plan_g.push_back(static_cast<int>(gold.plan.fairness));
        pol_p.push_back(p.polarity);
        pol_g.push_back(static_cast<int>(gold.polarity.polarity));
        for (int d = 0; d < 4; ++d) {
            bool pred = std::find(p.desires.begin(), p.desires.end(), d) != p.desires.end();
            des_p[static_cast<size_t>(d)].push_back(pred ? 1 : 0);
            des_g[static_cast<size_t>(d)].push_back(
                gold.desire.categories.count(static_cast<Desire>(d)) ? 1 : 0);
        }
    }
    std::map<std::string, TaskScores> out;
    auto cls = [](const std::vector<int>& p, const std::vector<int>& g) {
        auto r = evalkit::classification_metrics(p, g);
        return TaskScores{r.macro_f1, r.accuracy};
    };
    out["belief"] = cls(belief_p, belief_g);
    out["plan"] = cls(plan_p, plan_g);
    out["intent"] = cls(pol_p, pol_g);
    TaskScores desire;
    for (int d = 0; d < 4; ++d) {
        auto r = evalkit::classification_metrics(des_p[static_cast<size_t>(d)],
                                                 des_g[static_cast<size_t>(d)]);
        desire.macro_f1 += r.macro_f1 / 4.0;
        desire.accuracy += r.accuracy / 4.0;
    }
    out["desire"] = desire;
    return out;
}

std::string scores_csv(const std::map<std::string, TaskScores>& scores) {
    std::ostringstream out;
    out << "task,macro_f1,accuracy\n";
    char buf[64];
    for (const char* task : {"belief", "desire", "plan", "intent"}) {
        const TaskScores& s = scores.at(task);
        std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f", task, s.macro_f1, s.accuracy);
        out << buf << "\n";
    }
    return out.str();
}

void cmd_eval(Run& run) {
    Corpus c = run.corpus();
    SplitResult split = split_corpus(c, run.cfg.split);
    dmint::ModelGraph g = load_graph(run);
    write_file(run.out("eval.csv"), scores_csv(evaluate_graph(g, split.test)));
    run.manifest({{"eval", "eval.csv"}, {"test_articles", split.test.articles.size()}});
}

void cmd_ablate(Run& run) {
    Corpus c = run.corpus();
    SplitResult split = split_corpus(c, run.cfg.split);
    std::ostringstream out;
    out << "variant,best_epoch,val_polarity_macro_f1,test_polarity_macro_f1\n";
    char buf[96];
    for (const std::string& name : run.cfg.ablate_variants) {
        dmint::DmintConfig vc = dmint::ablate(run.cfg.model, dmint::variant_from_name(name));
        dmint::TrainConfig tc = run.cfg.train;
        tc.checkpoint_path.clear();
        dmint::TrainResult r = dmint::train(dmint::ModelGraph::init(vc), split.train, split.val,
                                            tc, run.cfg.vocab.content_hash());
        double test_f1 = dmint::polarity_macro_f1(r.graph, split.test);
        std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.6f", name.c_str(), r.best_epoch,
                      r.best_val_f1, test_f1);
        out << buf << "\n";
    }
    write_file(run.out("ablation.csv"), out.str());
    run.manifest({{"ablation", "ablation.csv"}});
}

std::map<std::string, double> load_labels(const std::string& path) {
    std::map<std::string, double> labels;
    std::istringstream in(read_file(path));
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            labels[j.at("id").get<std::string>()] = j.at("label").get<double>();
        } catch (const json::exception& e) {
            throw Error("ParseError",
                        path + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return labels;
}

void cmd_fuse(Run& run) {
    const auto& fc = run.cfg.fusion;
    if (fc.features_path.empty()) throw config_error("config has no 'fusion.features' path");
    if (fc.labels_path.empty()) throw config_error("config has no 'fusion.labels' path");
    Corpus c = run.corpus();
    SplitResult split = split_corpus(c, run.cfg.split);
    dmint::ModelGraph g = load_graph(run);

    run.note_input(fc.features_path);
    run.note_input(fc.labels_path);
    std::istringstream feats(read_file(fc.features_path));
    evalkit::FeatureTable task_features = evalkit::load_features(feats, fc.features_path);
    std::map<std::string, double> labels = load_labels(fc.labels_path);

    evalkit::FusionSource source;
    if (fc.source == "intent") source = evalkit::FusionSource::Intent;
    else if (fc.source == "concat") source = evalkit::FusionSource::Concat;
    else throw config_error("fusion.source must be 'intent' or 'concat'");
    evalkit::FusionSpec spec;
    spec.source = source;
    if (fc.task == "classification") spec.task = evalkit::FusionTask::Classification;
    else if (fc.task == "regression") spec.task = evalkit::FusionTask::Regression;
    else throw config_error("fusion.task must be 'classification' or 'regression'");
    spec.hidden = fc.hidden;
    spec.lr = fc.lr;
    spec.epochs = fc.epochs;
    spec.seed = fc.seed;

    evalkit::FeatureTable intent = evalkit::intent_feature_table(g, c, source);
    auto ids = [](const Corpus& part) {
        std::vector<std::string> out;
        for (const auto& a : part.articles) out.push_back(a.id);
        return out;
    };
    evalkit::FusionOutcome outcome = evalkit::fuse_and_train(
        task_features, intent, labels, ids(split.train), ids(split.test), spec);

    std::ostringstream out;
    char buf[128];
    if (spec.task == evalkit::FusionTask::Classification) {
        out << "run,feature_dim,macro_f1,accuracy,positive_f1\n";
        std::snprintf(buf, sizeof buf, "fused,%d,%.6f,%.6f,%.6f", outcome.fused_dim,
                      outcome.fused_cls.macro_f1, outcome.fused_cls.accuracy,
                      outcome.fused_cls.positive_f1);
        out << buf << "\n";
        std::snprintf(buf, sizeof buf, "control,%d,%.6f,%.6f,%.6f", outcome.control_dim,
                      outcome.control_cls.macro_f1, outcome.control_cls.accuracy,
                      outcome.control_cls.positive_f1);
        out << buf << "\n";
    } else {
        out << "run,feature_dim,rmse,medae,mae\n";
        std::snprintf(buf, sizeof buf, "fused,%d,%.6f,%.6f,%.6f", outcome.fused_dim,
                      outcome.fused_reg.rmse, outcome.fused_reg.medae, outcome.fused_reg.mae);
        out << buf << "\n";
        std::snprintf(buf, sizeof buf, "control,%d,%.6f,%.6f,%.6f", outcome.control_dim,
                      outcome.control_reg.rmse, outcome.control_reg.medae,
                      outcome.control_reg.mae);
        out << buf << "\n";
    }
    write_file(run.out("fusion.csv"), out.str());
    run.manifest({{"fusion", "fusion.csv"}});
}

void cmd_attribute(Run& run) {
    Corpus c = run.corpus();
    dmint::ModelGraph g = load_graph(run);
    std::vector<const NewsArticle*> picked;
    if (run.cfg.attribute_ids.empty()) {
        for (const auto& a : c.articles) picked.push_back(&a);
    } else {
        for (const auto& id : run.cfg.attribute_ids) {
            auto it = std::find_if(c.articles.begin(), c.articles.end(),
                                   [&](const NewsArticle& a) { return a.id == id; });
            if (it == c.articles.end())
                throw Error("UnknownId", "article id '" + id + "' not in the corpus");
            picked.push_back(&*it);
        }
    }
    json files = json::array();
    for (const NewsArticle* a : picked) {
        auto tokens = evalkit::attribute(g, *a);
        std::string jsonl = evalkit::attribution_jsonl(a->id, tokens);
        evalkit::validate_attribution_jsonl(jsonl);
        write_file(run.out(a->id + ".attribution.jsonl"), jsonl);
        write_file(run.out(a->id + ".attribution.html"),
                   evalkit::attribution_html(a->id, tokens));
        files.push_back(a->id + ".attribution.jsonl");
    }
    run.manifest({{"attributions", files}});
}

void cmd_analyze(Run& run) {
    Corpus c = run.corpus();
    write_file(run.out("unfair_by_stance.csv"),
               evalkit::proportions_csv(evalkit::unfair_by_stance(c)));
    write_file(run.out("unfair_by_desire.csv"),
               evalkit::proportions_csv(evalkit::unfair_by_desire(c)));
    write_file(run.out("engagement.csv"),
               evalkit::engagement_csv(evalkit::engagement_by_desire(c)));
    run.manifest({{"tables",
                   {"unfair_by_stance.csv", "unfair_by_desire.csv", "engagement.csv"}}});
}

void cmd_cost_report(Run& run) {
    if (run.cfg.records_path.empty()) throw config_error("config has no 'records' path");
    run.note_input(run.cfg.records_path);
    std::vector<dmg::CostRecord> records;
    std::istringstream in(read_file(run.cfg.records_path));
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            dmg::CostRecord r;
            r.method = dmg::method_from_name(j.at("method").get<std::string>());
            r.article_id = j.at("article_id").get<std::string>();
            r.queries = j.at("queries").get<int>();
            r.prompt_tokens = j.at("prompt_tokens").get<long>();
            r.completion_tokens = j.at("completion_tokens").get<long>();
            r.parsed_ok = j.at("parsed_ok").get<bool>();
            records.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw Error("ParseError", run.cfg.records_path + " line " + std::to_string(lineno) +
                                          ": " + e.what());
        }
    }
    auto rows = dmg::cost_report(records, run.cfg.scores);
    write_file(run.out("cost_report.csv"), dmg::cost_report_csv(rows));
    run.manifest({{"cost_report", "cost_report.csv"}});
}

}  // namespace

void run_command(const std::string& name, const RunConfig& cfg) {
    Run run(cfg, name);
    if (name == "validate") cmd_validate(run);
    else if (name == "split") cmd_split(run);
    else if (name == "stats") cmd_stats(run);
    else if (name == "annotate") cmd_annotate(run);
    else if (name == "agree") cmd_agree(run);
    else if (name == "verify") cmd_verify(run);
    else if (name == "train") cmd_train(run);
    else if (name == "eval") cmd_eval(run);
    else if (name == "ablate") cmd_ablate(run);
    else if (name == "fuse") cmd_fuse(run);
    else if (name == "attribute") cmd_attribute(run);
    else if (name == "analyze") cmd_analyze(run);
    else if (name == "cost-report") cmd_cost_report(run);
    else throw Error("UnknownCommand", "unknown subcommand '" + name + "'");
}

void run(const std::string& name, const std::string& config_json,
         const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg = parse_run_config(config_json.empty() ? "{}" : config_json);
    for (const auto& [key, value] : overrides) apply_override(cfg, key, value);
    run_command(name, cfg);
}

}  // namespace nint::cmd
