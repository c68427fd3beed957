#include "nint/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "nint/canonical.hpp"
#include "nint/error.hpp"

namespace nint {

using json = nlohmann::json;

namespace {

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    int month = (s[5] - '0') * 10 + (s[6] - '0');
    int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

json annotation_to_json(const IntentAnnotation& ann, const Vocabulary& vocab) {
    json j;
    j["annotator_id"] = ann.annotator_id;
    j["belief"] = {{"target", ann.belief.target}, {"stance", render(ann.belief.stance)}};
    json frames = json::array();
    for (FrameId f : ann.plan.frames) frames.push_back(vocab.frame_names.at(f));
    j["plan"] = {{"fairness", render(ann.plan.fairness)},
                 {"frames", frames},
                 {"persuasion", ann.plan.persuasion}};
    json emotions = json::array();
    for (EmotionId e : ann.reaction.emotions) emotions.push_back(vocab.emotion_names.at(e));
    j["reaction"] = {{"target_entity", ann.reaction.target_entity},
                     {"target_effect", render(ann.reaction.target_effect)},
                     {"social_debate", ann.reaction.social_debate},
                     {"opinion_shift", ann.reaction.opinion_shift},
                     {"emotions", emotions}};
    json desires = json::array();
    for (Desire d : ann.desire.categories) desires.push_back(render(d));
    j["desire"] = desires;
    j["polarity"] = render(ann.polarity.polarity);
    if (ann.rationale) j["rationale"] = *ann.rationale;
    return j;
}

IntentAnnotation annotation_from_json(const json& j, const Vocabulary& vocab) {
    IntentAnnotation ann;
    ann.annotator_id = j.value("annotator_id", "");
    const json& b = j.at("belief");
    ann.belief.target = b.value("target", "");
    ann.belief.stance = canonicalize_stance(b.at("stance").get<std::string>());
    const json& p = j.at("plan");
    ann.plan.fairness = canonicalize_fairness(p.at("fairness").get<std::string>());
    for (const auto& f : p.value("frames", json::array()))
        ann.plan.frames.insert(canonicalize_frame(f.get<std::string>(), vocab));
    ann.plan.persuasion = p.value("persuasion", false);
    const json& r = j.at("reaction");
    ann.reaction.target_entity = r.value("target_entity", "");
    ann.reaction.target_effect = canonicalize_effect(r.at("target_effect").get<std::string>());
    ann.reaction.social_debate = r.value("social_debate", false);
    ann.reaction.opinion_shift = r.value("opinion_shift", false);
    for (const auto& e : r.value("emotions", json::array()))
        ann.reaction.emotions.insert(canonicalize_emotion(e.get<std::string>(), vocab));
    for (const auto& d : j.at("desire"))
        ann.desire.categories.insert(canonicalize_desire(d.get<std::string>()));
    if (ann.desire.categories.empty())
        throw Error("InvalidLabel", "desire categories must be non-empty");
    ann.polarity.polarity = canonicalize_polarity(j.at("polarity").get<std::string>());
    if (j.contains("rationale")) ann.rationale = j["rationale"].get<std::string>();
    return ann;
}

}  // namespace

void SplitSpec::validate() const {
    for (double f : {train_frac, val_frac, test_frac})
        if (!(f > 0.0 && f < 1.0)) throw config_error("split fractions must be in (0,1)");
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw config_error("split fractions must sum to 1");
}

std::string article_to_json(const NewsArticle& a, const Vocabulary& vocab) {
    json j;
    j["id"] = a.id;
    j["title"] = a.title;
    j["content"] = a.content;
    j["topic"] = a.topic;
    j["domain"] = a.domain;
    j["date"] = a.date;
    if (a.author) j["author"] = *a.author;
    if (a.url) j["url"] = *a.url;
    if (a.social.subreddit) j["subreddit"] = *a.social.subreddit;
    json posts = json::array();
    for (const auto& p : a.social.posts)
        posts.push_back({{"post_id", p.post_id},
                         {"text", p.text},
                         {"timestamp", p.timestamp},
                         {"reply_depth", p.reply_depth}});
    j["posts"] = posts;
    json anns = json::array();
    for (const auto& ann : a.annotations) anns.push_back(annotation_to_json(ann, vocab));
    j["labels"] = {{"annotations", anns}};
    return j.dump();
}

NewsArticle article_from_json(const std::string& line, const Vocabulary& vocab) {
    json j = json::parse(line);
    NewsArticle a;
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
        throw Error("ParseError", "missing id");
    a.id = j["id"];
    a.title = j.value("title", "");
    if (!j.contains("content") || !j["content"].is_string())
        throw Error("ParseError", "missing content");
    a.content = j["content"];
    if (a.content.empty()) throw Error("ParseError", "empty content");
    a.topic = j.value("topic", "");
    a.domain = j.value("domain", "");
    if (!j.contains("date") || !j["date"].is_string())
        throw Error("ParseError", "missing date");
    a.date = j["date"];
    if (!valid_iso_date(a.date))
        throw Error("ParseError", "date '" + a.date + "' is not an ISO-8601 calendar date");
    if (j.contains("author")) a.author = j["author"].get<std::string>();
    if (j.contains("url")) a.url = j["url"].get<std::string>();
    if (j.contains("subreddit")) a.social.subreddit = j["subreddit"].get<std::string>();
    for (const auto& p : j.value("posts", json::array())) {
        SocialPost post;
        post.post_id = p.value("post_id", "");
        post.text = p.value("text", "");
        post.timestamp = p.value("timestamp", "");
        post.reply_depth = p.value("reply_depth", 0);
        if (post.reply_depth < 0) throw Error("ParseError", "reply_depth must be >= 0");
        a.social.posts.push_back(std::move(post));
    }
    if (j.contains("labels")) {
        const json& labels = j["labels"];
        for (const auto& ann : labels.value("annotations", json::array()))
            a.annotations.push_back(annotation_from_json(ann, vocab));
    }
    return a;
}

Corpus load_corpus(std::istream& in, const Vocabulary& vocab, const std::string& source_name) {
    Corpus corpus;
    corpus.vocab = vocab;
    std::string line;
    long line_no = 0;
    std::vector<std::string> problems;
    std::map<std::string, long> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            NewsArticle a = article_from_json(line, vocab);
            auto [it, inserted] = seen_ids.emplace(a.id, line_no);
            if (!inserted)
                throw Error("DuplicateId", "id '" + a.id + "' already seen on line " +
                                               std::to_string(it->second));
            corpus.articles.push_back(std::move(a));
        } catch (const std::exception& e) {
            problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!problems.empty()) {
        std::string msg = source_name + ": " + std::to_string(problems.size()) + " invalid record(s)";
        for (const auto& p : problems) msg += "\n  " + p;
        throw Error("ParseError", msg);
    }
    return corpus;
}

Corpus load_corpus(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open corpus file '" + path + "'");
    return load_corpus(in, vocab, path);
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot write corpus file '" + path + "'");
    for (const auto& a : corpus.articles) out << article_to_json(a, corpus.vocab) << "\n";
}

std::vector<size_t> split_sizes(size_t n, const SplitSpec& spec) {
    spec.validate();
    size_t n_train = static_cast<size_t>(std::floor(spec.train_frac * static_cast<double>(n)));
    size_t n_val = static_cast<size_t>(std::floor(spec.val_frac * static_cast<double>(n)));
    size_t n_test = static_cast<size_t>(std::floor(spec.test_frac * static_cast<double>(n)));
    n_train += n - (n_train + n_val + n_test);  // remainder goes to train
    return {n_train, n_val, n_test};
}

SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec) {
    spec.validate();
    std::vector<const NewsArticle*> order;
    order.reserve(corpus.articles.size());
    for (const auto& a : corpus.articles) {
        if (a.date.empty()) throw Error("MissingDate", "article '" + a.id + "' has no date");
        order.push_back(&a);
    }
    if (spec.mode == SplitMode::Temporal) {
        std::stable_sort(order.begin(), order.end(), [](const NewsArticle* x, const NewsArticle* y) {
            if (x->date != y->date) return x->date < y->date;
            return x->id < y->id;
        });
    } else {
        std::stable_sort(order.begin(), order.end(), [&](const NewsArticle* x, const NewsArticle* y) {
            return fnv1a64(x->id, spec.seed) < fnv1a64(y->id, spec.seed);
        });
    }
    auto sizes = split_sizes(order.size(), spec);
    SplitResult r;
    r.train.vocab = r.val.vocab = r.test.vocab = corpus.vocab;
    size_t i = 0;
    for (; i < sizes[0]; ++i) r.train.articles.push_back(*order[i]);
    for (; i < sizes[0] + sizes[1]; ++i) r.val.articles.push_back(*order[i]);
    for (; i < order.size(); ++i) r.test.articles.push_back(*order[i]);
    return r;
}

std::string article_polarity_group(const NewsArticle& a) {
    if (a.annotations.empty()) return "unlabeled";
    int harmful = 0;
    for (const auto& ann : a.annotations)
        if (ann.polarity.polarity == Polarity::Harmful) ++harmful;
    return 2 * harmful > static_cast<int>(a.annotations.size()) ? "harmful" : "unharmful";
}

namespace {

// Exact half-up rounding of sum/count to 2 decimals, via integer arithmetic.
std::string exact_avg_2dp(unsigned long long sum, unsigned long long count) {
    if (count == 0) return "0.00";
    unsigned long long scaled = sum * 200 + count;  // sum/count*100 + 0.5, times 2*count
    unsigned long long hundredths = scaled / (2 * count);
    std::ostringstream out;
    out << hundredths / 100 << "." << (hundredths % 100) / 10 << (hundredths % 10);
    return out.str();
}

}  // namespace

std::vector<StatsRow> corpus_stats(const Corpus& corpus, const std::string& group_by) {
    if (group_by != "subreddit" && group_by != "domain" && group_by != "polarity")
        throw config_error("group_by must be one of subreddit, domain, polarity");
    struct Acc {
        size_t count = 0;
        unsigned long long tokens = 0, posts = 0;
    };
    std::map<std::string, Acc> groups;
    for (const auto& a : corpus.articles) {
        std::string key;
        if (group_by == "subreddit")
            key = a.social.subreddit.value_or("(none)");
        else if (group_by == "domain")
            key = a.domain.empty() ? "(none)" : a.domain;
        else
            key = article_polarity_group(a);
        Acc& acc = groups[key];
        acc.count += 1;
        acc.tokens += whitespace_token_count(a.content);
        acc.posts += a.social.posts.size();
    }
    std::vector<StatsRow> rows;
    for (const auto& [key, acc] : groups) {
        StatsRow row;
        row.group = key;
        row.count = acc.count;
        row.avg_len = exact_avg_2dp(acc.tokens, acc.count);
        row.avg_posts = exact_avg_2dp(acc.posts, acc.count);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string stats_to_csv(const std::vector<StatsRow>& rows, const std::string& group_by) {
    std::ostringstream out;
    out << group_by << ",count,avg_len,avg_posts\n";
    for (const auto& r : rows)
        out << r.group << "," << r.count << "," << r.avg_len << "," << r.avg_posts << "\n";
    return out.str();
}

}  // namespace nint
