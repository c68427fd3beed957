#pragma once

#include <string>
#include <vector>

#include "nint/corpus.hpp"

namespace nint::evalkit {

// P(plan = unfair | group) over articles' first annotations.
struct ProportionRow {
    std::string group;
    size_t articles = 0;
    double unfair_proportion = 0.0;
    bool empty_group = false;
};

std::vector<ProportionRow> unfair_by_stance(const Corpus& corpus);
std::vector<ProportionRow> unfair_by_desire(const Corpus& corpus);
std::string proportions_csv(const std::vector<ProportionRow>& rows);

// Social engagement per desire category: post count and max reply depth are
// z-scored across the articles of each topic, then averaged per category.
struct EngagementRow {
    std::string topic;
    std::string desire;
    size_t articles = 0;
    double avg_z_post_count = 0.0;
    double avg_z_max_depth = 0.0;
    bool empty_group = false;    // no article in this topic has the desire
    bool zero_variance = false;  // the topic's statistic had no spread
};

std::vector<EngagementRow> engagement_by_desire(const Corpus& corpus);
std::string engagement_csv(const std::vector<EngagementRow>& rows);

}  // namespace nint::evalkit
