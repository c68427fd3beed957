#include "nint/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "nint/error.hpp"
#include "nint/metrics.hpp"

namespace nint::evalkit {

namespace {

const IntentAnnotation& first_annotation(const NewsArticle& a) {
    if (a.annotations.empty())
        throw Error("MissingLabels", "article '" + a.id + "' has no annotations");
    return a.annotations.front();
}

ProportionRow make_row(const std::string& group, size_t unfair, size_t total) {
    ProportionRow row;
    row.group = group;
    row.articles = total;
    if (total == 0) {
        row.empty_group = true;
    } else {
        row.unfair_proportion = static_cast<double>(unfair) / static_cast<double>(total);
    }
    return row;
}

}  // namespace

std::vector<ProportionRow> unfair_by_stance(const Corpus& corpus) {
    std::array<size_t, 3> unfair{}, total{};
    for (const auto& a : corpus.articles) {
        const auto& ann = first_annotation(a);
        size_t s = static_cast<size_t>(ann.belief.stance);
        ++total[s];
        if (ann.plan.fairness == Fairness::Unfair) ++unfair[s];
    }
    std::vector<ProportionRow> rows;
    for (Stance s : {Stance::Favor, Stance::Against, Stance::Neutral}) {
        size_t i = static_cast<size_t>(s);
        rows.push_back(make_row(render(s), unfair[i], total[i]));
    }
    return rows;
}

std::vector<ProportionRow> unfair_by_desire(const Corpus& corpus) {
    std::array<size_t, 4> unfair{}, total{};
    for (const auto& a : corpus.articles) {
        const auto& ann = first_annotation(a);
        for (Desire d : ann.desire.categories) {
            size_t i = static_cast<size_t>(d);
            ++total[i];
            if (ann.plan.fairness == Fairness::Unfair) ++unfair[i];
        }
    }
    std::vector<ProportionRow> rows;
    for (Desire d : {Desire::PublicInterest, Desire::PoliticalInterest, Desire::EconomicInterest,
                     Desire::PsychologicalFulfillment}) {
        size_t i = static_cast<size_t>(d);
        rows.push_back(make_row(render(d), unfair[i], total[i]));
    }
    return rows;
}

std::string proportions_csv(const std::vector<ProportionRow>& rows) {
    std::ostringstream out;
    out << "group,articles,unfair_proportion,empty_group\n";
    char buf[32];
    for (const auto& r : rows) {
        if (r.empty_group) {
            out << r.group << ",0,,true\n";
        } else {
            std::snprintf(buf, sizeof buf, "%.4f", r.unfair_proportion);
            out << r.group << ',' << r.articles << ',' << buf << ",false\n";
        }
    }
    return out.str();
}

std::vector<EngagementRow> engagement_by_desire(const Corpus& corpus) {
    // per topic, in first-seen order
    std::vector<std::string> topics;
    std::map<std::string, std::vector<const NewsArticle*>> by_topic;
    for (const auto& a : corpus.articles) {
        if (!by_topic.count(a.topic)) topics.push_back(a.topic);
        by_topic[a.topic].push_back(&a);
    }

    std::vector<EngagementRow> rows;
    for (const auto& topic : topics) {
        const auto& articles = by_topic[topic];
        std::vector<double> post_counts, max_depths;
        for (const NewsArticle* a : articles) {
            post_counts.push_back(static_cast<double>(a->social.posts.size()));
            int depth = 0;
            for (const auto& p : a->social.posts) depth = std::max(depth, p.reply_depth);
            max_depths.push_back(depth);
        }
        bool zero_var_posts = false, zero_var_depth = false;
        std::vector<double> z_posts(post_counts.size(), 0.0), z_depth(max_depths.size(), 0.0);
        try {
            z_posts = zscore(post_counts);
        } catch (const Error&) {
            zero_var_posts = true;
        }
        try {
            z_depth = zscore(max_depths);
        } catch (const Error&) {
            zero_var_depth = true;
        }

        for (Desire d : {Desire::PublicInterest, Desire::PoliticalInterest,
                         Desire::EconomicInterest, Desire::PsychologicalFulfillment}) {
            EngagementRow row;
            row.topic = topic;
            row.desire = render(d);
            double sum_posts = 0.0, sum_depth = 0.0;
            for (size_t i = 0; i < articles.size(); ++i) {
                if (!first_annotation(*articles[i]).desire.categories.count(d)) continue;
                ++row.articles;
                sum_posts += z_posts[i];
                sum_depth += z_depth[i];
            }
            if (row.articles == 0) {
                row.empty_group = true;
            } else {
                row.avg_z_post_count = sum_posts / static_cast<double>(row.articles);
                row.avg_z_max_depth = sum_depth / static_cast<double>(row.articles);
            }
            row.zero_variance = zero_var_posts || zero_var_depth;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string engagement_csv(const std::vector<EngagementRow>& rows) {
    std::ostringstream out;
    out << "topic,desire,articles,avg_z_post_count,avg_z_max_depth,empty_group,zero_variance\n";
    char buf[64];
    for (const auto& r : rows) {
        out << r.topic << ',' << r.desire << ',' << r.articles << ',';
        if (r.empty_group) {
            out << ",,true," << (r.zero_variance ? "true" : "false") << "\n";
        } else {
            std::snprintf(buf, sizeof buf, "%.4f,%.4f", r.avg_z_post_count, r.avg_z_max_depth);
            out << buf << ",false," << (r.zero_variance ? "true" : "false") << "\n";
        }
    }
    return out.str();
}

}  // namespace nint::evalkit
