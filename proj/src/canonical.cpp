#include "nint/canonical.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "nint/error.hpp"

namespace nint {

const std::vector<Slot>& all_slots() {
    static const std::vector<Slot> slots = {
        Slot::BeliefStance, Slot::Frames,       Slot::Persuasion, Slot::Fairness,
        Slot::TargetEffect, Slot::SocialDebate, Slot::OpinionShift, Slot::Emotions,
        Slot::Desires,      Slot::Polarity,
    };
    return slots;
}

std::string slot_name(Slot s) {
    switch (s) {
        case Slot::BeliefStance: return "belief-stance";
        case Slot::Frames: return "frames";
        case Slot::Persuasion: return "persuasion";
        case Slot::Fairness: return "fairness";
        case Slot::TargetEffect: return "target-effect";
        case Slot::SocialDebate: return "social-debate";
        case Slot::OpinionShift: return "opinion-shift";
        case Slot::Emotions: return "emotions";
        case Slot::Desires: return "desires";
        case Slot::Polarity: return "polarity";
    }
    return "?";
}

Slot slot_from_name(const std::string& name) {
    for (Slot s : all_slots())
        if (slot_name(s) == name) return s;
    throw Error("UnknownSlot", "unknown slot '" + name + "'");
}

std::string normalize_text(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;  // punctuation and whitespace both collapse
        }
    }
    return out;
}

namespace {

bool contains_word(const std::string& normalized, const std::string& word) {
    size_t pos = 0;
    while ((pos = normalized.find(word, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || normalized[pos - 1] == ' ';
        size_t end = pos + word.size();
        bool right_ok = end == normalized.size() || normalized[end] == ' ';
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

// Drop trailing filler nouns that annotators and models append to frame
// names ("economic problem", "security frame").
std::string strip_frame_suffix(std::string s) {
    for (const char* suffix : {" problem", " problems", " frame", " frames", " issue", " issues"}) {
        std::string suf(suffix);
        if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0)
            s.erase(s.size() - suf.size());
    }
    return s;
}

std::vector<std::string> split_raw(const std::string& raw, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(raw);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (parts.empty()) parts.push_back("");
    return parts;
}

// Split a multi-select answer on ';' or ','. Some vocabulary entries contain
// commas themselves, so a failed piece is greedily re-joined with the next
// one before giving up.
template <typename MatchFn>
std::vector<std::string> split_multi(const std::string& raw, MatchFn matches,
                                     const std::string& slot) {
    std::string body = raw;
    // "none" means an empty selection
    std::string norm = normalize_text(body);
    if (norm.empty() || norm == "none" || norm == "no frames" || norm == "n a")
        return {};
    if (matches(body)) return {body};
    char sep = body.find(';') != std::string::npos ? ';' : ',';
    std::vector<std::string> pieces = split_raw(body, sep);
    std::vector<std::string> out;
    size_t i = 0;
    while (i < pieces.size()) {
        std::string candidate = pieces[i];
        size_t j = i;
        while (!matches(candidate)) {
            ++j;
            if (j >= pieces.size()) throw unknown_label(slot, pieces[i]);
            candidate += sep;
            candidate += pieces[j];
        }
        out.push_back(candidate);
        i = j + 1;
    }
    return out;
}

}  // namespace

Stance canonicalize_stance(const std::string& raw) {
    std::string s = normalize_text(raw);
    if (contains_word(s, "favor") || contains_word(s, "favour") || s == "for" ||
        contains_word(s, "support") || contains_word(s, "supports"))
        return Stance::Favor;
    if (contains_word(s, "against") || contains_word(s, "oppose") || contains_word(s, "opposes"))
        return Stance::Against;
    if (contains_word(s, "neutral") || contains_word(s, "none")) return Stance::Neutral;
    throw unknown_label("belief-stance", raw);
}

Fairness canonicalize_fairness(const std::string& raw) {
    std::string s = normalize_text(raw);
    if (contains_word(s, "unfair") || s == "not fair" || contains_word(s, "unfairly"))
        return Fairness::Unfair;
    if (contains_word(s, "fair") || contains_word(s, "fairly")) return Fairness::Fair;
    throw unknown_label("fairness", raw);
}

Effect canonicalize_effect(const std::string& raw) {
    std::string s = normalize_text(raw);
    if (contains_word(s, "positive")) return Effect::Positive;
    if (contains_word(s, "negative")) return Effect::Negative;
    if (contains_word(s, "neither") || contains_word(s, "neutral") || contains_word(s, "none"))
        return Effect::Neither;
    throw unknown_label("target-effect", raw);
}

Polarity canonicalize_polarity(const std::string& raw) {
    std::string s = normalize_text(raw);
    if (contains_word(s, "unharmful") || s == "not harmful" || contains_word(s, "harmless") ||
        contains_word(s, "benign"))
        return Polarity::Unharmful;
    if (contains_word(s, "harmful")) return Polarity::Harmful;
    throw unknown_label("polarity", raw);
}

Desire canonicalize_desire(const std::string& raw) {
    std::string s = strip_frame_suffix(normalize_text(raw));
    if (s == "public interest" || s == "public" || s == "pub int" || s == "pub")
        return Desire::PublicInterest;
    if (s == "political interest" || s == "political interests" || s == "political" || s == "pol")
        return Desire::PoliticalInterest;
    if (s == "economic interest" || s == "economic interests" || s == "economic" || s == "eco")
        return Desire::EconomicInterest;
    if (s == "psychological fulfillment" || s == "psychological fulfilment" ||
        s == "psychological" || s == "psy")
        return Desire::PsychologicalFulfillment;
    if (s == "public interests") return Desire::PublicInterest;
    throw unknown_label("desires", raw);
}

bool canonicalize_boolean(const std::string& raw, const std::string& slot) {
    std::string s = normalize_text(raw);
    if (s == "yes" || s == "true" || s == "y" || contains_word(s, "yes")) return true;
    if (s == "no" || s == "false" || s == "n" || contains_word(s, "no") ||
        contains_word(s, "not"))
        return false;
    throw unknown_label(slot, raw);
}

FrameId canonicalize_frame(const std::string& raw, const Vocabulary& vocab) {
    std::string s = strip_frame_suffix(normalize_text(raw));
    for (size_t i = 0; i < vocab.frame_names.size(); ++i) {
        if (normalize_text(vocab.frame_names[i]) == s) return static_cast<int>(i);
    }
    throw unknown_label("frames", raw);
}

EmotionId canonicalize_emotion(const std::string& raw, const Vocabulary& vocab) {
    std::string s = normalize_text(raw);
    for (size_t i = 0; i < vocab.emotion_names.size(); ++i) {
        if (normalize_text(vocab.emotion_names[i]) == s) return static_cast<int>(i);
    }
    throw unknown_label("emotions", raw);
}

std::vector<FrameId> canonicalize_frame_list(const std::string& raw, const Vocabulary& vocab) {
    auto matches = [&](const std::string& piece) {
        try {
            canonicalize_frame(piece, vocab);
            return true;
        } catch (const Error&) {
            return false;
        }
    };
    std::vector<FrameId> out;
    for (const auto& piece : split_multi(raw, matches, "frames"))
        out.push_back(canonicalize_frame(piece, vocab));
    return out;
}

std::vector<EmotionId> canonicalize_emotion_list(const std::string& raw, const Vocabulary& vocab) {
    auto matches = [&](const std::string& piece) {
        try {
            canonicalize_emotion(piece, vocab);
            return true;
        } catch (const Error&) {
            return false;
        }
    };
    std::vector<EmotionId> out;
    for (const auto& piece : split_multi(raw, matches, "emotions"))
        out.push_back(canonicalize_emotion(piece, vocab));
    return out;
}

std::vector<Desire> canonicalize_desire_list(const std::string& raw) {
    auto matches = [&](const std::string& piece) {
        try {
            canonicalize_desire(piece);
            return true;
        } catch (const Error&) {
            return false;
        }
    };
    std::vector<Desire> out;
    for (const auto& piece : split_multi(raw, matches, "desires"))
        out.push_back(canonicalize_desire(piece));
    return out;
}

LabelTensor label_tensor(const IntentAnnotation& ann) {
    LabelTensor t;
    t.belief = {0, 0, 0};
    t.belief[static_cast<int>(ann.belief.stance)] = 1;
    t.desire = {0, 0, 0, 0};
    for (Desire d : ann.desire.categories) t.desire[static_cast<int>(d)] = 1;
    t.plan = {0, 0};
    t.plan[static_cast<int>(ann.plan.fairness)] = 1;
    t.polarity = {0, 0};
    t.polarity[static_cast<int>(ann.polarity.polarity)] = 1;
    return t;
}

}  // namespace nint
