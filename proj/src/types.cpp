#include "nint/types.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "nint/error.hpp"

namespace nint {

Vocabulary Vocabulary::defaults() {
    Vocabulary v;
    v.frame_names = {
        "economic",
        "capacity and resources",
        "morality",
        "fairness and equality",
        "legality, constitutionality and jurisprudence",
        "policy prescription and evaluation",
        "crime and punishment",
        "security and defense",
        "health and safety",
        "quality of life",
        "cultural identity",
        "public opinion",
        "political",
        "external regulation and reputation",
    };
    v.emotion_names = {
        "anger", "anticipation", "joy", "trust", "fear",
        "surprise", "sadness", "disgust", "distrust",
    };
    return v;
}

int Vocabulary::frame_index(const std::string& canonical_name) const {
    for (size_t i = 0; i < frame_names.size(); ++i)
        if (frame_names[i] == canonical_name) return static_cast<int>(i);
    return -1;
}

int Vocabulary::emotion_index(const std::string& canonical_name) const {
    for (size_t i = 0; i < emotion_names.size(); ++i)
        if (emotion_names[i] == canonical_name) return static_cast<int>(i);
    return -1;
}

void Vocabulary::validate() const {
    if (frame_names.empty()) throw config_error("frame vocabulary is empty");
    if (emotion_names.empty()) throw config_error("emotion vocabulary is empty");
    std::set<std::string> seen(frame_names.begin(), frame_names.end());
    if (seen.size() != frame_names.size()) throw config_error("duplicate frame names");
    std::set<std::string> seen2(emotion_names.begin(), emotion_names.end());
    if (seen2.size() != emotion_names.size()) throw config_error("duplicate emotion names");
}

uint64_t Vocabulary::content_hash() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& n : frame_names) h = fnv1a64(n + "\x1f", h);
    h = fnv1a64("\x1e", h);
    for (const auto& n : emotion_names) h = fnv1a64(n + "\x1f", h);
    return h;
}

std::string render(Stance v) {
    switch (v) {
        case Stance::Favor: return "favor";
        case Stance::Against: return "against";
        case Stance::Neutral: return "neutral";
    }
    return "neutral";
}

std::string render(Fairness v) { return v == Fairness::Fair ? "fair" : "unfair"; }

std::string render(Effect v) {
    switch (v) {
        case Effect::Positive: return "positive";
        case Effect::Negative: return "negative";
        case Effect::Neither: return "neither";
    }
    return "neither";
}

std::string render(Polarity v) { return v == Polarity::Harmful ? "harmful" : "unharmful"; }

std::string render(Desire v) {
    switch (v) {
        case Desire::PublicInterest: return "public interest";
        case Desire::PoliticalInterest: return "political interest";
        case Desire::EconomicInterest: return "economic interest";
        case Desire::PsychologicalFulfillment: return "psychological fulfillment";
    }
    return "public interest";
}

std::vector<std::string> whitespace_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

size_t whitespace_token_count(const std::string& text) {
    size_t count = 0;
    bool in_token = false;
    for (char c : text) {
        bool ws = (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v');
        if (!ws && !in_token) ++count;
        in_token = !ws;
    }
    return count;
}

uint64_t fnv1a64(const std::string& data, uint64_t seed) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace nint
