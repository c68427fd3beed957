#pragma once

#include <optional>
#include <string>
#include <vector>

namespace nint::evalkit {

struct ClassificationReport {
    double macro_f1 = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double accuracy = 0.0;
    double positive_f1 = 0.0;                 // F1 of the designated positive class
    std::vector<int> classes;                 // sorted union of labels seen
    std::vector<double> per_class_f1;
    std::vector<int> absent_classes;          // present in preds only; F1 fixed to 0
};

// Macro-averaged precision/recall/F1 over the union of classes in
// golds/preds. A class absent from the golds gets F1 = 0 and is flagged.
ClassificationReport classification_metrics(const std::vector<int>& preds,
                                            const std::vector<int>& golds,
                                            std::optional<int> positive_class = std::nullopt);

struct RegressionReport {
    double rmse = 0.0;
    double medae = 0.0;
    double mae = 0.0;
};

RegressionReport regression_metrics(const std::vector<double>& preds,
                                    const std::vector<double>& golds);

// Population z-scores: output mean 0, population SD 1. Throws ZeroVariance
// on a constant series.
std::vector<double> zscore(const std::vector<double>& series);

}  // namespace nint::evalkit
