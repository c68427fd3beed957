#include "nint/agreement.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "nint/canonical.hpp"
#include "nint/error.hpp"

namespace nint {

void RatingTable::validate() const {
    if (counts.empty()) throw Error("InvalidTable", "rating table needs at least 1 item");
    if (categories() < 2) throw Error("InvalidTable", "rating table needs at least 2 categories");
    if (raters_per_item < 2) throw Error("InvalidTable", "raters_per_item must be >= 2");
    for (size_t i = 0; i < counts.size(); ++i) {
        if (counts[i].size() != categories())
            throw Error("InvalidTable", "ragged rating table at row " + std::to_string(i));
        long sum = 0;
        for (long c : counts[i]) {
            if (c < 0) throw Error("InvalidTable", "negative count at row " + std::to_string(i));
            sum += c;
        }
        if (sum != raters_per_item)
            throw Error("InvalidTable", "row " + std::to_string(i) + " sums to " +
                                            std::to_string(sum) + ", expected " +
                                            std::to_string(raters_per_item));
    }
}

RatingTable RatingTable::from_csv(const std::string& text) {
    RatingTable t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::vector<long> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stol(cell));
        t.counts.push_back(std::move(row));
    }
    if (!t.counts.empty())
        t.raters_per_item = std::accumulate(t.counts[0].begin(), t.counts[0].end(), 0L);
    t.validate();
    return t;
}

// Per-item observed agreement P_i = sum_j n_ij (n_ij - 1) / (n (n - 1)).
static double mean_observed_agreement(const RatingTable& t) {
    const double n = static_cast<double>(t.raters_per_item);
    double total = 0.0;
    for (const auto& row : t.counts) {
        double agree = 0.0;
        for (long c : row) agree += static_cast<double>(c) * (c - 1);
        total += agree / (n * (n - 1.0));
    }
    return total / static_cast<double>(t.items());
}

KappaResult fleiss_kappa(const RatingTable& table) {
    table.validate();
    const double N = static_cast<double>(table.items());
    const double n = static_cast<double>(table.raters_per_item);
    double p_bar = mean_observed_agreement(table);
    double pe = 0.0;
    for (size_t j = 0; j < table.categories(); ++j) {
        long col = 0;
        for (const auto& row : table.counts) col += row[j];
        double pj = static_cast<double>(col) / (N * n);
        pe += pj * pj;
    }
    KappaResult r;
    if (pe >= 1.0 - 1e-15) {
        // every rater on every item picked the same single category
        r.value = 1.0;
        r.degenerate = true;
        return r;
    }
    r.value = (p_bar - pe) / (1.0 - pe);
    return r;
}

double free_marginal_kappa(const RatingTable& table) {
    table.validate();
    const double k = static_cast<double>(table.categories());
    double p_bar = mean_observed_agreement(table);
    return (p_bar - 1.0 / k) / (1.0 - 1.0 / k);
}

double pairwise_agreement(const RatingTable& table) {
    table.validate();
    return mean_observed_agreement(table);
}

std::string kappa_interpretation(double kappa) {
    if (kappa < 0.0) return "Poor";
    if (kappa <= 0.20) return "Slight";
    if (kappa <= 0.40) return "Fair";
    if (kappa <= 0.60) return "Moderate";
    if (kappa <= 0.80) return "Substantial";
    return "Almost perfect";
}

// ---- majority aggregation ------------------------------------------------

namespace {

// Majority winner among candidate values 0..k-1; ties resolve to safer_value
// and are reported via `tied`.
int majority_vote(const std::vector<int>& votes, int k, int safer_value, bool& tied,
                  int& support) {
    std::vector<int> tally(k, 0);
    for (int v : votes) tally[v]++;
    int best = 0;
    for (int i = 1; i < k; ++i)
        if (tally[i] > tally[best]) best = i;
    int winners = 0;
    for (int i = 0; i < k; ++i)
        if (tally[i] == tally[best]) ++winners;
    tied = winners > 1;
    if (tied) best = tally[safer_value] == tally[best] ? safer_value : best;
    support = tally[best];
    return best;
}

// Most common string; ties resolve to the lexicographically smallest so the
// result is independent of annotator order.
std::string majority_text(const std::vector<std::string>& values) {
    std::map<std::string, int> tally;
    for (const auto& v : values) tally[v]++;
    std::string best;
    int best_count = -1;
    for (const auto& [v, c] : tally)
        if (c > best_count) {
            best = v;
            best_count = c;
        }
    return best;
}

}  // namespace

AggregationResult aggregate_majority(const std::vector<IntentAnnotation>& annotations,
                                     int min_raters) {
    const int n = static_cast<int>(annotations.size());
    if (n < min_raters)
        throw Error("InsufficientRaters", "need at least " + std::to_string(min_raters) +
                                              " annotations, got " + std::to_string(n));
    AggregationResult result;
    auto flag_tie = [&](bool tied, const std::string& slot) {
        if (tied) result.tied_slots.push_back(slot);
    };
    bool tied = false;
    int support = 0;

    std::vector<int> stances;
    std::vector<std::string> targets;
    for (const auto& a : annotations) {
        stances.push_back(static_cast<int>(a.belief.stance));
        targets.push_back(a.belief.target);
    }
    result.annotation.belief.stance = static_cast<Stance>(
        majority_vote(stances, 3, static_cast<int>(Stance::Neutral), tied, support));
    flag_tie(tied, "belief-stance");
    result.support["belief-stance"] = support;
    result.annotation.belief.target = majority_text(targets);

    std::vector<int> fairness, persuasion;
    std::map<FrameId, int> frame_tally;
    for (const auto& a : annotations) {
        fairness.push_back(static_cast<int>(a.plan.fairness));
        persuasion.push_back(a.plan.persuasion ? 1 : 0);
        for (FrameId f : a.plan.frames) frame_tally[f]++;
    }
    result.annotation.plan.fairness = static_cast<Fairness>(
        majority_vote(fairness, 2, static_cast<int>(Fairness::Fair), tied, support));
    flag_tie(tied, "fairness");
    result.support["fairness"] = support;
    result.annotation.plan.persuasion =
        majority_vote(persuasion, 2, 0, tied, support) == 1;
    flag_tie(tied, "persuasion");
    result.support["persuasion"] = support;
    for (const auto& [f, c] : frame_tally)
        if (2 * c > n) result.annotation.plan.frames.insert(f);
    result.support["frames"] = static_cast<int>(result.annotation.plan.frames.size());

    std::vector<int> effects, debates, shifts;
    std::vector<std::string> entities;
    std::map<EmotionId, int> emotion_tally;
    for (const auto& a : annotations) {
        effects.push_back(static_cast<int>(a.reaction.target_effect));
        debates.push_back(a.reaction.social_debate ? 1 : 0);
        shifts.push_back(a.reaction.opinion_shift ? 1 : 0);
        entities.push_back(a.reaction.target_entity);
        for (EmotionId e : a.reaction.emotions) emotion_tally[e]++;
    }
    result.annotation.reaction.target_entity = majority_text(entities);
    result.annotation.reaction.target_effect = static_cast<Effect>(
        majority_vote(effects, 3, static_cast<int>(Effect::Neither), tied, support));
    flag_tie(tied, "target-effect");
    result.support["target-effect"] = support;
    result.annotation.reaction.social_debate = majority_vote(debates, 2, 0, tied, support) == 1;
    flag_tie(tied, "social-debate");
    result.support["social-debate"] = support;
    result.annotation.reaction.opinion_shift = majority_vote(shifts, 2, 0, tied, support) == 1;
    flag_tie(tied, "opinion-shift");
    result.support["opinion-shift"] = support;
    for (const auto& [e, c] : emotion_tally)
        if (2 * c > n) result.annotation.reaction.emotions.insert(e);

    std::map<Desire, int> desire_tally;
    for (const auto& a : annotations)
        for (Desire d : a.desire.categories) desire_tally[d]++;
    for (const auto& [d, c] : desire_tally)
        if (2 * c > n) result.annotation.desire.categories.insert(d);
    if (result.annotation.desire.categories.empty()) {
        // desire is multi-label but must stay non-empty: fall back to the
        // single most voted category (canonical order breaks ties)
        Desire best = Desire::PublicInterest;
        int best_count = -1;
        for (const auto& [d, c] : desire_tally)
            if (c > best_count) {
                best = d;
                best_count = c;
            }
        result.annotation.desire.categories.insert(best);
        result.tied_slots.push_back("desires");
    }
    result.support["desires"] = static_cast<int>(result.annotation.desire.categories.size());

    std::vector<int> polarities;
    for (const auto& a : annotations)
        polarities.push_back(static_cast<int>(a.polarity.polarity));
    result.annotation.polarity.polarity = static_cast<Polarity>(
        majority_vote(polarities, 2, static_cast<int>(Polarity::Unharmful), tied, support));
    flag_tie(tied, "polarity");
    result.support["polarity"] = support;

    result.annotation.annotator_id = "aggregate";
    return result;
}

// ---- verification --------------------------------------------------------

VerificationRow verification_stats(const std::string& dimension,
                                   const std::vector<VerificationItem>& items) {
    if (items.empty()) throw Error("EmptyInput", "no verification items");
    RatingTable table;
    long min_votes = -1;
    for (const auto& it : items) {
        if (it.votes.size() < 3)
            throw Error("InsufficientRaters",
                        "item '" + it.item_id + "' has fewer than 3 credibility votes");
        long v = static_cast<long>(it.votes.size());
        if (min_votes < 0 || v < min_votes) min_votes = v;
    }
    // agreement statistics need a fixed rater count per item: truncate each
    // item to the smallest vote count present
    table.raters_per_item = min_votes;
    size_t any = 0, three = 0;
    for (const auto& it : items) {
        long credible = 0;
        for (bool v : it.votes) credible += v ? 1 : 0;
        if (credible >= 1) ++any;
        if (credible >= 3) ++three;
        long cred_trunc = 0;
        for (long i = 0; i < min_votes; ++i) cred_trunc += it.votes[i] ? 1 : 0;
        table.counts.push_back({cred_trunc, min_votes - cred_trunc});
    }
    VerificationRow row;
    row.dimension = dimension;
    row.any_credible_pct = 100.0 * static_cast<double>(any) / static_cast<double>(items.size());
    row.three_credible_pct = 100.0 * static_cast<double>(three) / static_cast<double>(items.size());
    row.pairwise = pairwise_agreement(table);
    row.free_marginal = free_marginal_kappa(table);
    return row;
}

std::string verification_to_csv(const std::vector<VerificationRow>& rows) {
    std::ostringstream out;
    out << "dimension,any_credible_pct,three_credible_pct,pairwise_agreement,free_marginal_kappa\n";
    out.setf(std::ios::fixed);
    out.precision(4);
    for (const auto& r : rows)
        out << r.dimension << "," << r.any_credible_pct << "," << r.three_credible_pct << ","
            << r.pairwise << "," << r.free_marginal << "\n";
    return out.str();
}

}  // namespace nint
