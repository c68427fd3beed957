#include "nint/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "nint/error.hpp"

namespace nint::evalkit {

ClassificationReport classification_metrics(const std::vector<int>& preds,
                                            const std::vector<int>& golds,
                                            std::optional<int> positive_class) {
    if (preds.empty() || preds.size() != golds.size())
        throw Error("EmptyInput", "prediction and gold vectors must be non-empty and equal length");
    std::set<int> class_set(golds.begin(), golds.end());
    class_set.insert(preds.begin(), preds.end());
    std::set<int> gold_set(golds.begin(), golds.end());

    ClassificationReport r;
    r.classes.assign(class_set.begin(), class_set.end());
    size_t correct = 0;
    for (size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == golds[i]) ++correct;
    r.accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());

    for (int cls : r.classes) {
        long tp = 0, fp = 0, fn = 0;
        for (size_t i = 0; i < preds.size(); ++i) {
            bool p = preds[i] == cls, g = golds[i] == cls;
            if (p && g) ++tp;
            else if (p) ++fp;
            else if (g) ++fn;
        }
        double prec = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        double rec = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        double f1 = (prec + rec > 0.0) ? 2.0 * prec * rec / (prec + rec) : 0.0;
        if (!gold_set.count(cls)) {
            f1 = 0.0;  // convention: a class never in the golds scores 0
            r.absent_classes.push_back(cls);
        }
        r.per_class_f1.push_back(f1);
        r.macro_precision += prec;
        r.macro_recall += rec;
        r.macro_f1 += f1;
        if (positive_class && cls == *positive_class) r.positive_f1 = f1;
    }
    double k = static_cast<double>(r.classes.size());
    r.macro_precision /= k;
    r.macro_recall /= k;
    r.macro_f1 /= k;
    return r;
}

RegressionReport regression_metrics(const std::vector<double>& preds,
                                    const std::vector<double>& golds) {
    if (preds.empty() || preds.size() != golds.size())
        throw Error("EmptyInput", "prediction and gold vectors must be non-empty and equal length");
    RegressionReport r;
    std::vector<double> abs_err;
    double sq = 0.0, sum_abs = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        double e = preds[i] - golds[i];
        sq += e * e;
        sum_abs += std::abs(e);
        abs_err.push_back(std::abs(e));
    }
    double n = static_cast<double>(preds.size());
    r.rmse = std::sqrt(sq / n);
    r.mae = sum_abs / n;
    std::sort(abs_err.begin(), abs_err.end());
    size_t m = abs_err.size();
    r.medae = (m % 2 == 1) ? abs_err[m / 2] : 0.5 * (abs_err[m / 2 - 1] + abs_err[m / 2]);
    return r;
}

std::vector<double> zscore(const std::vector<double>& series) {
    if (series.size() < 2) throw Error("EmptyInput", "z-score needs at least 2 values");
    double n = static_cast<double>(series.size());
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : series) var += (x - mean) * (x - mean);
    var /= n;  // population variance, no Bessel correction
    if (var <= 0.0) throw Error("ZeroVariance", "series has zero variance");
    double sd = std::sqrt(var);
    std::vector<double> out;
    out.reserve(series.size());
    for (double x : series) out.push_back((x - mean) / sd);
    return out;
}

}  // namespace nint::evalkit
