#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nint/corpus.hpp"
#include "nint/metrics.hpp"
#include "nint/model.hpp"

namespace nint::evalkit {

// Feature vectors keyed by article id; interchange format is JSONL lines
// {"id": ..., "values": [...]}.
struct FeatureTable {
    std::map<std::string, std::vector<double>> rows;
};

FeatureTable load_features(std::istream& in, const std::string& source_name);
std::string features_to_jsonl(const FeatureTable& table);

enum class FusionSource { Intent, Concat };  // F_I alone, or B+D+P+I concatenated

// Intent features for every article in the corpus, from a trained graph.
FeatureTable intent_feature_table(const dmint::ModelGraph& graph, const Corpus& corpus,
                                  FusionSource source);

enum class FusionTask { Classification, Regression };

struct FusionSpec {
    FusionSource source = FusionSource::Intent;
    FusionTask task = FusionTask::Classification;
    int hidden = 32;
    double lr = 1e-2;
    int epochs = 200;
    uint64_t seed = 3;
};

struct FusionOutcome {
    // classification task
    ClassificationReport fused_cls, control_cls;
    // regression task
    RegressionReport fused_reg, control_reg;
    // feature-shape accounting: the control head never sees intent features
    int fused_dim = 0;
    int control_dim = 0;
};

// Train a two-layer MLP on task ++ intent features (fused) and on task
// features alone (control), report both on the test ids. Labels are 0/1 for
// classification, real for regression. Throws AlignmentError when an id is
// missing from either table.
FusionOutcome fuse_and_train(const FeatureTable& task_features,
                             const FeatureTable& intent_features,
                             const std::map<std::string, double>& labels,
                             const std::vector<std::string>& train_ids,
                             const std::vector<std::string>& test_ids, const FusionSpec& spec);

}  // namespace nint::evalkit
