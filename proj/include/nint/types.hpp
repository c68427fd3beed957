#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nint {

enum class Stance { Favor, Against, Neutral };
enum class Fairness { Fair, Unfair };
enum class Effect { Positive, Negative, Neither };
enum class Polarity { Harmful, Unharmful };

enum class Desire { PublicInterest, PoliticalInterest, EconomicInterest, PsychologicalFulfillment };

using FrameId = int;
using EmotionId = int;

// Configurable label vocabularies. Frames default to 14 generic framing
// categories; emotions default to eight basic emotions plus "distrust".
// Both can be overridden from the run config.
struct Vocabulary {
    std::vector<std::string> frame_names;
    std::vector<std::string> emotion_names;

    static Vocabulary defaults();

    int frame_index(const std::string& canonical_name) const;    // -1 if absent
    int emotion_index(const std::string& canonical_name) const;  // -1 if absent
    void validate() const;  // throws Error on duplicates / wrong counts
    uint64_t content_hash() const;
};

struct BeliefLabel {
    std::string target;  // free text, preserved verbatim
    Stance stance = Stance::Neutral;
    bool operator==(const BeliefLabel&) const = default;
};

struct DesireLabel {
    std::set<Desire> categories;  // non-empty (multi-label)
    bool operator==(const DesireLabel&) const = default;
};

struct PlanLabel {
    Fairness fairness = Fairness::Fair;
    std::set<FrameId> frames;
    bool persuasion = false;
    bool operator==(const PlanLabel&) const = default;
};

struct ReactionLabel {
    std::string target_entity;  // free text, preserved verbatim
    Effect target_effect = Effect::Neither;
    bool social_debate = false;
    bool opinion_shift = false;
    std::set<EmotionId> emotions;
    bool operator==(const ReactionLabel&) const = default;
};

struct PolarityLabel {
    Polarity polarity = Polarity::Unharmful;
    bool operator==(const PolarityLabel&) const = default;
};

struct IntentAnnotation {
    BeliefLabel belief;
    PlanLabel plan;
    ReactionLabel reaction;
    DesireLabel desire;
    PolarityLabel polarity;
    std::string annotator_id;
    std::optional<std::string> rationale;
    bool operator==(const IntentAnnotation&) const = default;
};

struct SocialPost {
    std::string post_id;
    std::string text;
    std::string timestamp;
    int reply_depth = 0;  // >= 0
    bool operator==(const SocialPost&) const = default;
};

struct SocialContext {
    std::optional<std::string> subreddit;
    std::vector<SocialPost> posts;
    bool operator==(const SocialContext&) const = default;
};

struct NewsArticle {
    std::string id;
    std::string title;
    std::string content;  // non-empty
    std::string topic;
    std::string domain;
    std::string date;  // ISO-8601 calendar date
    std::optional<std::string> author;
    std::optional<std::string> url;
    SocialContext social;
    std::vector<IntentAnnotation> annotations;
    bool operator==(const NewsArticle&) const = default;
};

// ---- enum <-> text -------------------------------------------------------

std::string render(Stance v);
std::string render(Fairness v);
std::string render(Effect v);
std::string render(Polarity v);
std::string render(Desire v);

// Whitespace tokenization used for "avg. len." statistics and token budgets.
std::vector<std::string> whitespace_tokens(const std::string& text);
size_t whitespace_token_count(const std::string& text);

// Stable 64-bit FNV-1a; seeds let us derive independent hash families.
uint64_t fnv1a64(const std::string& data, uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace nint
