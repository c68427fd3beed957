#pragma once

#include <map>
#include <string>
#include <vector>

#include "nint/types.hpp"

namespace nint {

// Items x categories count matrix; every row sums to exactly
// raters_per_item.
struct RatingTable {
    std::vector<std::vector<long>> counts;
    long raters_per_item = 0;

    size_t items() const { return counts.size(); }
    size_t categories() const { return counts.empty() ? 0 : counts[0].size(); }
    void validate() const;  // throws Error when invariants are violated

    static RatingTable from_csv(const std::string& text);
};

struct KappaResult {
    double value = 0.0;
    bool degenerate = false;  // chance agreement == 1, value fixed to 1
};

// Fleiss' multi-rater kappa. Returns 1 with degenerate=true when expected
// chance agreement is exactly 1.
KappaResult fleiss_kappa(const RatingTable& table);

// Randolph's free-marginal kappa: (Pbar - 1/k) / (1 - 1/k).
double free_marginal_kappa(const RatingTable& table);

// Mean over items of agreeing rater pairs / (n choose 2). Equals the Pbar
// of the Fleiss computation.
double pairwise_agreement(const RatingTable& table);

// Landis & Koch qualitative band, for display only.
std::string kappa_interpretation(double kappa);

// ---- majority aggregation ------------------------------------------------

struct AggregationResult {
    IntentAnnotation annotation;
    std::map<std::string, int> support;         // slot name -> winning vote count
    std::vector<std::string> tied_slots;        // resolved toward the safer pole
};

// Per-slot majority vote. Multi-label slots keep options chosen by more than
// half of the raters; ties resolve toward Neutral / Fair / Unharmful /
// Neither / false and are flagged.
AggregationResult aggregate_majority(const std::vector<IntentAnnotation>& annotations,
                                     int min_raters = 3);

// ---- verification report -------------------------------------------------

struct VerificationItem {
    std::string item_id;
    std::vector<bool> votes;  // credible / not credible, >= 3 per item
};

struct VerificationRow {
    std::string dimension;
    double any_credible_pct = 0.0;     // >= 1 credible vote
    double three_credible_pct = 0.0;   // >= 3 credible votes
    double pairwise = 0.0;
    double free_marginal = 0.0;
};

VerificationRow verification_stats(const std::string& dimension,
                                   const std::vector<VerificationItem>& items);
std::string verification_to_csv(const std::vector<VerificationRow>& rows);

}  // namespace nint
