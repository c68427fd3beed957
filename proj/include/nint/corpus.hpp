#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nint/types.hpp"

namespace nint {

struct Corpus {
    std::vector<NewsArticle> articles;
    Vocabulary vocab;
};

enum class SplitMode { Temporal, Random };

struct SplitSpec {
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;
    SplitMode mode = SplitMode::Temporal;
    uint64_t seed = 0;  // Random mode only

    void validate() const;  // fractions in (0,1), sum to 1 +- 1e-9
};

struct SplitResult {
    Corpus train, val, test;
};

// One article per line, JSON object per line, UTF-8. Field names:
// id, title, content, topic, domain, date, author, url, subreddit,
// posts[], labels{}. See README for the full schema.
Corpus load_corpus(const std::string& path, const Vocabulary& vocab);
Corpus load_corpus(std::istream& in, const Vocabulary& vocab, const std::string& source_name);
void save_corpus(const Corpus& corpus, const std::string& path);

std::string article_to_json(const NewsArticle& a, const Vocabulary& vocab);
NewsArticle article_from_json(const std::string& line, const Vocabulary& vocab);

// Sizes: floor each fraction, remainder goes to train. Temporal mode sorts
// by (date, id) ascending so max(train dates) <= min(test dates).
std::vector<size_t> split_sizes(size_t n, const SplitSpec& spec);
SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec);

struct StatsRow {
    std::string group;
    size_t count = 0;
    std::string avg_len;    // whitespace tokens, 2 decimals, exact rounding
    std::string avg_posts;  // 2 decimals
};

// group_by in {subreddit, domain, polarity}
std::vector<StatsRow> corpus_stats(const Corpus& corpus, const std::string& group_by);
std::string stats_to_csv(const std::vector<StatsRow>& rows, const std::string& group_by);

// Gold polarity of an article: majority over its annotations, ties toward
// Unharmful. Returns "unlabeled" if there are no annotations.
std::string article_polarity_group(const NewsArticle& a);

}  // namespace nint
