#pragma once

#include <string>
#include <vector>

#include "nint/types.hpp"

namespace nint {

// The ten question slots of the guided prompt, in their fixed order.
enum class Slot {
    BeliefStance,
    Frames,
    Persuasion,
    Fairness,
    TargetEffect,
    SocialDebate,
    OpinionShift,
    Emotions,
    Desires,
    Polarity,
};

constexpr int kSlotCount = 10;

const std::vector<Slot>& all_slots();
std::string slot_name(Slot s);
Slot slot_from_name(const std::string& name);  // throws Error on unknown

// Lowercase, strip punctuation, collapse whitespace. Shared by the
// canonicalizer and the response parser.
std::string normalize_text(const std::string& raw);

// Map free-form answer text onto enum / vocabulary values. Case-insensitive,
// punctuation-tolerant, with a small synonym table ("not harmful" ->
// unharmful, "yes"/"no" for booleans, ...). Throws UnknownLabel if nothing
// matches.
Stance canonicalize_stance(const std::string& raw);
Fairness canonicalize_fairness(const std::string& raw);
Effect canonicalize_effect(const std::string& raw);
Polarity canonicalize_polarity(const std::string& raw);
Desire canonicalize_desire(const std::string& raw);
bool canonicalize_boolean(const std::string& raw, const std::string& slot);
FrameId canonicalize_frame(const std::string& raw, const Vocabulary& vocab);
EmotionId canonicalize_emotion(const std::string& raw, const Vocabulary& vocab);

// Comma/semicolon-separated multi-select answers.
std::vector<FrameId> canonicalize_frame_list(const std::string& raw, const Vocabulary& vocab);
std::vector<EmotionId> canonicalize_emotion_list(const std::string& raw, const Vocabulary& vocab);
std::vector<Desire> canonicalize_desire_list(const std::string& raw);

// ---- label tensors -------------------------------------------------------

// Binary target vectors for the four classification heads.
//   belief  (3): favor, against, neutral      (one-hot)
//   desire  (4): public, political, economic, psychological  (multi-hot)
//   plan    (2): fair, unfair                 (one-hot)
//   polarity(2): harmful, unharmful           (one-hot)
struct LabelTensor {
    std::vector<double> belief;    // size 3
    std::vector<double> desire;    // size 4
    std::vector<double> plan;      // size 2
    std::vector<double> polarity;  // size 2
};

LabelTensor label_tensor(const IntentAnnotation& ann);

}  // namespace nint
