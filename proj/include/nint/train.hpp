#pragma once

#include <map>
#include <string>
#include <vector>

#include "nint/corpus.hpp"
#include "nint/model.hpp"

namespace nint::dmint {

struct TrainConfig {
    double lr = 2e-5;
    int batch = 64;
    int epochs = 20;
    uint64_t seed = 7;
    int patience = 10;                 // epochs without val improvement
    std::string checkpoint_path;       // best model; empty = don't write
    // Adam moments
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;            // mean per-example total loss
    double val_polarity_macro_f1 = 0.0;
};

struct TrainResult {
    ModelGraph graph;  // best-on-validation parameters
    std::vector<EpochRecord> history;
    int best_epoch = -1;
    double best_val_f1 = 0.0;
};

// Gold target of an article: its first annotation (the pipeline emits one
// aggregated annotation per article).
LabelTensor article_target(const NewsArticle& a);

// Mean per-example total loss and summed parameter gradients over a set of
// examples. Throws NonFiniteGradient if any gradient entry is not finite.
double compute_loss_and_grads(ModelGraph& graph, const std::vector<const NewsArticle*>& batch,
                              std::map<std::string, Mat>* grads);

double mean_total_loss(const ModelGraph& graph, const Corpus& corpus);
double polarity_macro_f1(const ModelGraph& graph, const Corpus& corpus);

TrainResult train(ModelGraph graph, const Corpus& train_set, const Corpus& val_set,
                  const TrainConfig& cfg, uint64_t vocab_hash);

// Per-article intent features from a trained graph.
struct IntentFeatures {
    std::vector<double> belief, desire, plan, intent;
    std::vector<double> gate;  // 3 simplex weights
};
IntentFeatures extract_features(const ModelGraph& graph, const NewsArticle& article);

}  // namespace nint::dmint
