#pragma once

#include <array>
#include <string>
#include <vector>

#include "nint/model.hpp"

namespace nint::evalkit {

// Token scores for the belief, desire, and plan extractors: the Euclidean
// norm of d||F_t||_1 / d(embedding row). Non-negative; padding scores 0.
struct TokenAttribution {
    std::string token;
    std::array<double, 3> scores{0.0, 0.0, 0.0};  // B, D, P
};

std::vector<TokenAttribution> attribute(const dmint::ModelGraph& graph,
                                        const NewsArticle& article);

// Same scores for an explicit embedded token matrix and mask.
std::vector<std::array<double, 3>> attribution_scores(const dmint::ModelGraph& graph,
                                                      const ad::Mat& w, const ad::Mask& mask);

// Data file: one JSON line per token with fields article_id, index, token,
// belief, desire, plan.
std::string attribution_jsonl(const std::string& article_id,
                              const std::vector<TokenAttribution>& tokens);
// Throws SchemaError when a line does not match the attribution record shape.
void validate_attribution_jsonl(const std::string& text);

// Static heatmap: yellow = belief, red = desire, blue = plan, darker = higher.
std::string attribution_html(const std::string& article_id,
                             const std::vector<TokenAttribution>& tokens);

}  // namespace nint::evalkit
