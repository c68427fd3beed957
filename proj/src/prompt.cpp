#include "nint/prompt.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <sstream>

#include "nint/error.hpp"

namespace nint::dmg {

Method method_from_name(const std::string& name) {
    if (name == "standard") return Method::Standard;
    if (name == "direct-cot") return Method::DirectCoT;
    if (name == "standard-cot") return Method::StandardCoT;
    if (name == "dmg") return Method::DMG;
    throw Error("UnknownMethod", "unknown prompting method '" + name + "'");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Standard: return "standard";
        case Method::DirectCoT: return "direct-cot";
        case Method::StandardCoT: return "standard-cot";
        case Method::DMG: return "dmg";
    }
    return "?";
}

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

// "topic | title content", content tail-truncated to fit the token budget.
std::string article_input(const NewsArticle& a, int budget_tokens) {
    std::string head = a.topic + " | " + a.title + " ";
    long used = static_cast<long>(whitespace_token_count(head));
    std::vector<std::string> content = whitespace_tokens(a.content);
    long keep = std::max(0L, static_cast<long>(budget_tokens) - used);
    if (static_cast<long>(content.size()) > keep)
        content.resize(static_cast<size_t>(keep));
    return head + join(content, " ");
}

std::string options_line(const std::vector<std::string>& names) {
    return "Options: " + join(names, "; ") + ".";
}

std::string slot_question(Slot s, const Vocabulary& vocab) {
    switch (s) {
        case Slot::BeliefStance:
            return "What is the article's stance on its central theme? Answer as "
                   "\"stance: <favor|against|neutral>; target: <the central theme>\".";
        case Slot::Frames:
            return "Which framing categories does the article use? Answer with a "
                   "comma-separated list, or \"none\". " + options_line(vocab.frame_names);
        case Slot::Persuasion:
            return "Does the article try to persuade the reader? Answer yes or no.";
        case Slot::Fairness:
            return "Does the article present its subject fairly? Answer fair or unfair.";
        case Slot::TargetEffect:
            return "Which entity does the article target, and what effect does it seek "
                   "for that entity? Answer as \"target: <entity>; effect: "
                   "<positive|negative|neither>\".";
        case Slot::SocialDebate:
            return "Does the article aim to trigger social debate? Answer yes or no.";
        case Slot::OpinionShift:
            return "Does the article aim to shift readers' opinions? Answer yes or no.";
        case Slot::Emotions:
            return "Which emotions does the article try to evoke? Answer with a "
                   "comma-separated list, or \"none\". " + options_line(vocab.emotion_names);
        case Slot::Desires:
            return "Which desires drive the publication? Answer with a comma-separated "
                   "list from: public interest; political interest; economic interest; "
                   "psychological fulfillment.";
        case Slot::Polarity:
            return "Synthesizing all the answers above, is the news intent harmful or "
                   "unharmful?";
    }
    return "?";
}

const char* kTask =
    "You are given a news article. Decide whether the intent behind its "
    "publication is harmful or unharmful.";

}  // namespace

PromptBundle build_prompt(const NewsArticle& article, Method method, const Vocabulary& vocab,
                          const PromptOptions& opts) {
    if (article.content.empty())
        throw Error("EmptyInput", "article '" + article.id + "' has empty content");
    std::string input = article_input(article, opts.budget_tokens);
    PromptBundle b;
    b.method = method;
    switch (method) {
        case Method::Standard:
            b.text_blocks = {std::string(kTask) + " Answer with a single word, harmful or "
                             "unharmful.\n\nArticle: " + input};
            b.slots = {Slot::Polarity};
            b.queries_needed = 1;
            break;
        case Method::DirectCoT:
            b.text_blocks = {std::string(kTask) + " Let's think step by step, then end "
                             "with \"polarity: harmful\" or \"polarity: unharmful\".\n\n"
                             "Article: " + input};
            b.slots = {Slot::Polarity};
            b.queries_needed = 1;
            break;
        case Method::StandardCoT:
            b.text_blocks = {std::string(kTask) + " First, reason step by step about the "
                             "article's goals and likely effects.\n\nArticle: " + input,
                             "Given your reasoning above, answer with a single word: "
                             "harmful or unharmful."};
            b.slots = {Slot::Polarity};
            b.queries_needed = 2;
            break;
        case Method::DMG: {
            std::ostringstream out;
            out << kTask << " Answer the following questions in order, as a numbered "
                   "list with one answer per line.\n\nArticle: " << input << "\n\n";
            int n = 0;
            for (Slot s : all_slots()) out << ++n << ". " << slot_question(s, vocab) << "\n";
            b.text_blocks = {out.str()};
            b.slots = all_slots();
            b.queries_needed = 1;
            break;
        }
    }
    return b;
}

bool ParsedResponse::complete() const {
    for (const auto& [slot, st] : status)
        if (st != SlotStatus::Ok) return false;
    return !status.empty();
}

std::vector<Slot> ParsedResponse::failed_slots() const {
    std::vector<Slot> out;
    for (const auto& [slot, st] : status)
        if (st != SlotStatus::Ok) out.push_back(slot);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void apply_slot(IntentAnnotation& ann, Slot slot, const std::string& raw,
                const Vocabulary& vocab) {
    switch (slot) {
        case Slot::BeliefStance: {
            bool have_stance = false;
            std::string piece;
            std::istringstream in(raw);
            while (std::getline(in, piece, ';')) {
                size_t colon = piece.find(':');
                if (colon == std::string::npos) {
                    if (!have_stance) {
                        ann.belief.stance = canonicalize_stance(piece);
                        have_stance = true;
                    }
                    continue;
                }
                std::string key = normalize_text(piece.substr(0, colon));
                std::string value = piece.substr(colon + 1);
                if (key == "stance") {
                    ann.belief.stance = canonicalize_stance(value);
                    have_stance = true;
                } else if (key == "target" || key == "theme") {
                    ann.belief.target = trim(value);
                }
            }
            if (!have_stance) throw unknown_label("belief-stance", raw);
            break;
        }
        case Slot::Frames:
            ann.plan.frames.clear();
            for (FrameId f : canonicalize_frame_list(raw, vocab)) ann.plan.frames.insert(f);
            break;
        case Slot::Persuasion:
            ann.plan.persuasion = canonicalize_boolean(raw, "persuasion");
            break;
        case Slot::Fairness:
            ann.plan.fairness = canonicalize_fairness(raw);
            break;
        case Slot::TargetEffect: {
            bool have_effect = false;
            std::string piece;
            std::istringstream in(raw);
            while (std::getline(in, piece, ';')) {
                size_t colon = piece.find(':');
                if (colon == std::string::npos) {
                    if (!have_effect) {
                        try {
                            ann.reaction.target_effect = canonicalize_effect(piece);
                            have_effect = true;
                        } catch (const Error&) {
                            ann.reaction.target_entity = trim(piece);
                        }
                    }
                    continue;
                }
                std::string key = normalize_text(piece.substr(0, colon));
                std::string value = piece.substr(colon + 1);
                if (key == "target" || key == "entity") {
                    ann.reaction.target_entity = trim(value);
                } else if (key == "effect") {
                    ann.reaction.target_effect = canonicalize_effect(value);
                    have_effect = true;
                }
            }
            if (!have_effect) throw unknown_label("target-effect", raw);
            break;
        }
        case Slot::SocialDebate:
            ann.reaction.social_debate = canonicalize_boolean(raw, "social-debate");
            break;
        case Slot::OpinionShift:
            ann.reaction.opinion_shift = canonicalize_boolean(raw, "opinion-shift");
            break;
        case Slot::Emotions:
            ann.reaction.emotions.clear();
            for (EmotionId e : canonicalize_emotion_list(raw, vocab))
                ann.reaction.emotions.insert(e);
            break;
        case Slot::Desires: {
            ann.desire.categories.clear();
            for (Desire d : canonicalize_desire_list(raw)) ann.desire.categories.insert(d);
            if (ann.desire.categories.empty()) throw unknown_label("desires", raw);
            break;
        }
        case Slot::Polarity:
            ann.polarity.polarity = canonicalize_polarity(raw);
            break;
    }
}

// Header names a model might use for each slot.
const std::vector<std::pair<std::string, Slot>>& header_aliases() {
    static const std::vector<std::pair<std::string, Slot>> aliases = {
        {"belief stance", Slot::BeliefStance}, {"belief", Slot::BeliefStance},
        {"stance", Slot::BeliefStance},
        {"frames", Slot::Frames},              {"frame", Slot::Frames},
        {"framing", Slot::Frames},
        {"persuasion", Slot::Persuasion},
        {"fairness", Slot::Fairness},
        {"target effect", Slot::TargetEffect}, {"target and effect", Slot::TargetEffect},
        {"effect", Slot::TargetEffect},
        {"social debate", Slot::SocialDebate}, {"debate", Slot::SocialDebate},
        {"opinion shift", Slot::OpinionShift}, {"shift", Slot::OpinionShift},
        {"emotions", Slot::Emotions},          {"emotion", Slot::Emotions},
        {"desires", Slot::Desires},            {"desire", Slot::Desires},
        {"polarity", Slot::Polarity},          {"intent polarity", Slot::Polarity},
    };
    return aliases;
}

// Free-text fallback for a lone polarity slot (chain-of-thought answers):
// take the final harmful/unharmful mention.
bool scan_polarity(const std::string& text, Polarity* out) {
    std::string norm = " " + normalize_text(text) + " ";
    size_t un = norm.rfind(" unharmful ");
    size_t nh = norm.rfind(" not harmful ");
    size_t harmless = norm.rfind(" harmless ");
    size_t pos_un = std::string::npos;
    for (size_t p : {un, nh, harmless})
        if (p != std::string::npos && (pos_un == std::string::npos || p > pos_un)) pos_un = p;
    size_t pos_h = std::string::npos, at = 0;
    while ((at = norm.find(" harmful ", at)) != std::string::npos) {
        pos_h = at;
        ++at;
    }
    if (pos_un == std::string::npos && pos_h == std::string::npos) return false;
    // " not harmful " overlaps its own " harmful " hit
    bool unharmful = pos_un != std::string::npos &&
                     (pos_h == std::string::npos || pos_h <= pos_un + 5);
    *out = unharmful ? Polarity::Unharmful : Polarity::Harmful;
    return true;
}

}  // namespace

ParsedResponse parse_response(const std::string& text, const std::vector<Slot>& slots,
                              const Vocabulary& vocab) {
    ParsedResponse result;
    std::map<Slot, std::string> answers;

    // pass 1: numbered items, multi-line answers run until the next number
    static const std::regex numbered(R"(^\s*(\d{1,2})\s*[.):\]-]\s*(.*)$)");
    std::istringstream in(text);
    std::string line;
    int current = -1;
    while (std::getline(in, line)) {
        std::smatch m;
        if (std::regex_match(line, m, numbered)) {
            current = std::stoi(m[1].str());
            if (current >= 1 && current <= static_cast<int>(slots.size()))
                answers[slots[static_cast<size_t>(current - 1)]] = m[2].str();
            else
                current = -1;
        } else if (current >= 1 && current <= static_cast<int>(slots.size())) {
            answers[slots[static_cast<size_t>(current - 1)]] += "\n" + line;
        }
    }

    // pass 2: labeled headers for anything still missing
    static const std::regex header(R"(^\s*[*#>\s-]*([A-Za-z][A-Za-z /+-]*?)\s*:\s*(.*)$)");
    std::istringstream in2(text);
    while (std::getline(in2, line)) {
        std::smatch m;
        if (!std::regex_match(line, m, header)) continue;
        std::string key = normalize_text(m[1].str());
        for (const auto& [alias, slot] : header_aliases()) {
            if (key != alias) continue;
            if (std::find(slots.begin(), slots.end(), slot) != slots.end() &&
                !answers.count(slot))
                answers[slot] = m[2].str();
            break;
        }
    }

    for (Slot slot : slots) {
        auto it = answers.find(slot);
        if (it == answers.end() || trim(it->second).empty()) {
            // chain-of-thought fallback for single-slot polarity bundles
            Polarity p;
            if (slots.size() == 1 && slot == Slot::Polarity && scan_polarity(text, &p)) {
                result.annotation.polarity.polarity = p;
                result.status[slot] = SlotStatus::Ok;
            } else {
                result.status[slot] = SlotStatus::Missing;
                result.errors[slot] = "no answer found";
            }
            continue;
        }
        try {
            apply_slot(result.annotation, slot, it->second, vocab);
            result.status[slot] = SlotStatus::Ok;
        } catch (const Error& e) {
            result.status[slot] = SlotStatus::Invalid;
            result.errors[slot] = e.what();
        }
    }
    return result;
}

std::string render_response(const IntentAnnotation& ann, const Vocabulary& vocab) {
    auto names = [](const auto& ids, const std::vector<std::string>& table) {
        std::vector<std::string> out;
        for (int id : ids) out.push_back(table[static_cast<size_t>(id)]);
        return out.empty() ? std::string("none") : join(out, ", ");
    };
    std::vector<std::string> desires;
    for (Desire d : ann.desire.categories) desires.push_back(render(d));
    std::ostringstream out;
    out << "1. stance: " << render(ann.belief.stance) << "; target: " << ann.belief.target << "\n"
        << "2. " << names(ann.plan.frames, vocab.frame_names) << "\n"
        << "3. " << (ann.plan.persuasion ? "yes" : "no") << "\n"
        << "4. " << render(ann.plan.fairness) << "\n"
        << "5. target: " << ann.reaction.target_entity << "; effect: "
        << render(ann.reaction.target_effect) << "\n"
        << "6. " << (ann.reaction.social_debate ? "yes" : "no") << "\n"
        << "7. " << (ann.reaction.opinion_shift ? "yes" : "no") << "\n"
        << "8. " << names(ann.reaction.emotions, vocab.emotion_names) << "\n"
        << "9. " << (desires.empty() ? std::string("none") : join(desires, ", ")) << "\n"
        << "10. " << render(ann.polarity.polarity) << "\n";
    return out.str();
}

std::vector<CostRow> cost_report(const std::vector<CostRecord>& records,
                                 const std::map<std::string, double>& macro_f1) {
    std::map<std::string, std::vector<const CostRecord*>> by_method;
    for (const auto& r : records) {
        if (r.queries < 1 || r.prompt_tokens < 0 || r.completion_tokens < 0)
            throw Error("InvalidCostRecord", "cost record for '" + r.article_id +
                                                 "' has negative counts");
        by_method[method_name(r.method)].push_back(&r);
    }
    double standard_tokens = 0.0;
    std::vector<CostRow> rows;
    for (const char* name : {"standard", "direct-cot", "standard-cot", "dmg"}) {
        auto it = by_method.find(name);
        if (it == by_method.end()) continue;
        CostRow row;
        row.method = name;
        row.articles = it->second.size();
        double ok = 0;
        for (const CostRecord* r : it->second) {
            row.avg_queries += r->queries;
            row.avg_tokens += static_cast<double>(r->prompt_tokens + r->completion_tokens);
            if (r->parsed_ok) ok += 1;
        }
        double n = static_cast<double>(row.articles);
        row.avg_queries /= n;
        row.avg_tokens /= n;
        row.parse_rate = ok / n;
        if (row.method == "standard") standard_tokens = row.avg_tokens;
        rows.push_back(row);
    }
    if (!macro_f1.empty() && macro_f1.count("standard")) {
        (void)standard_tokens;
        double base = macro_f1.at("standard");
        for (auto& row : rows) {
            auto it = macro_f1.find(row.method);
            if (it == macro_f1.end() || row.avg_tokens <= 0.0) continue;
            row.ratio = (it->second - base) / (row.avg_tokens / 100.0);
        }
    }
    return rows;
}

std::string cost_report_csv(const std::vector<CostRow>& rows) {
    std::ostringstream out;
    out << "method,articles,avg_queries,avg_tokens,parse_rate,macro_f1_gain_per_100_tokens\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.1f,%.1f,%.3f", r.avg_queries, r.avg_tokens,
                      r.parse_rate);
        out << r.method << ',' << r.articles << ',' << buf << ',';
        if (r.ratio) {
            std::snprintf(buf, sizeof buf, "%.3f", *r.ratio);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace nint::dmg
