#include "nint/fusion.hpp"

#include <istream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nint/error.hpp"
#include "nint/tape.hpp"
#include "nint/train.hpp"

namespace nint::evalkit {

using ad::Mat;
using ad::Tape;
using nlohmann::json;

FeatureTable load_features(std::istream& in, const std::string& source_name) {
    FeatureTable table;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            std::string id = j.at("id").get<std::string>();
            std::vector<double> values = j.at("values").get<std::vector<double>>();
            if (!table.rows.emplace(id, std::move(values)).second)
                throw Error("DuplicateId", "duplicate feature id '" + id + "'");
        } catch (const json::exception& e) {
            throw Error("ParseError", source_name + " line " + std::to_string(lineno) + ": " +
                                          e.what());
        }
    }
    return table;
}

std::string features_to_jsonl(const FeatureTable& table) {
    std::ostringstream out;
    for (const auto& [id, values] : table.rows)
        out << json{{"id", id}, {"values", values}}.dump() << "\n";
    return out.str();
}

FeatureTable intent_feature_table(const dmint::ModelGraph& graph, const Corpus& corpus,
                                  FusionSource source) {
    FeatureTable table;
    for (const auto& a : corpus.articles) {
        dmint::IntentFeatures f = dmint::extract_features(graph, a);
        std::vector<double> values;
        if (source == FusionSource::Concat) {
            values.insert(values.end(), f.belief.begin(), f.belief.end());
            values.insert(values.end(), f.desire.begin(), f.desire.end());
            values.insert(values.end(), f.plan.begin(), f.plan.end());
        }
        values.insert(values.end(), f.intent.begin(), f.intent.end());
        table.rows[a.id] = std::move(values);
    }
    return table;
}

namespace {

const std::vector<double>& lookup(const FeatureTable& table, const std::string& id) {
    auto it = table.rows.find(id);
    if (it == table.rows.end())
        throw Error("AlignmentError", "no feature vector for article id '" + id + "'");
    return it->second;
}

Mat assemble(const FeatureTable& task, const FeatureTable* intent,
             const std::vector<std::string>& ids) {
    if (ids.empty()) throw Error("EmptyInput", "no article ids");
    Eigen::Index d_task = static_cast<Eigen::Index>(lookup(task, ids[0]).size());
    Eigen::Index d_intent =
        intent ? static_cast<Eigen::Index>(lookup(*intent, ids[0]).size()) : 0;
    Mat x(static_cast<Eigen::Index>(ids.size()), d_task + d_intent);
    for (size_t i = 0; i < ids.size(); ++i) {
        const auto& t = lookup(task, ids[i]);
        if (static_cast<Eigen::Index>(t.size()) != d_task)
            throw Error("AlignmentError", "task feature width mismatch at '" + ids[i] + "'");
        for (Eigen::Index c = 0; c < d_task; ++c) x(static_cast<Eigen::Index>(i), c) = t[c];
        if (intent) {
            const auto& v = lookup(*intent, ids[i]);
            if (static_cast<Eigen::Index>(v.size()) != d_intent)
                throw Error("AlignmentError", "intent feature width mismatch at '" + ids[i] + "'");
            for (Eigen::Index c = 0; c < d_intent; ++c)
                x(static_cast<Eigen::Index>(i), d_task + c) = v[c];
        }
    }
    return x;
}

Mat label_column(const std::map<std::string, double>& labels,
                 const std::vector<std::string>& ids) {
    Mat y(static_cast<Eigen::Index>(ids.size()), 1);
    for (size_t i = 0; i < ids.size(); ++i) {
        auto it = labels.find(ids[i]);
        if (it == labels.end())
            throw Error("AlignmentError", "no label for article id '" + ids[i] + "'");
        y(static_cast<Eigen::Index>(i), 0) = it->second;
    }
    return y;
}

struct Mlp {
    Mat w1, b1, w2, b2;
};

Mlp init_mlp(Eigen::Index d, int hidden, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 0.2 / std::sqrt(static_cast<double>(d)));
    Mlp m{Mat(d, hidden), Mat::Zero(1, hidden), Mat(hidden, 1), Mat::Zero(1, 1)};
    for (Eigen::Index i = 0; i < m.w1.size(); ++i) m.w1(i) = dist(rng);
    for (Eigen::Index i = 0; i < m.w2.size(); ++i) m.w2(i) = dist(rng);
    return m;
}

Mat mlp_scores(const Mlp& m, const Mat& x) {
    Mat h = ((x * m.w1).rowwise() + m.b1.row(0)).cwiseMax(0.0);
    return (h * m.w2).rowwise() + m.b2.row(0);
}

void train_mlp(Mlp& m, const Mat& x, const Mat& y, FusionTask task, const FusionSpec& spec) {
    std::map<std::string, Mat> ms, vs;
    std::map<std::string, Mat*> params{
        {"w1", &m.w1}, {"b1", &m.b1}, {"w2", &m.w2}, {"b2", &m.b2}};
    for (auto& [name, p] : params) {
        ms[name] = Mat::Zero(p->rows(), p->cols());
        vs[name] = Mat::Zero(p->rows(), p->cols());
    }
    for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
        Tape tape;
        int nx = tape.input(x);
        std::map<std::string, int> nodes;
        for (auto& [name, p] : params) nodes[name] = tape.input(*p);
        int hidden = tape.relu(tape.add_rowvec(tape.matmul(nx, nodes["w1"]), nodes["b1"]));
        int scores = tape.add_rowvec(tape.matmul(hidden, nodes["w2"]), nodes["b2"]);
        int loss = task == FusionTask::Classification
                       ? tape.bce_sum(tape.sigmoid(scores), y)
                       : tape.squared_error_sum(scores, y);
        tape.backward(loss);
        double bc1 = 1.0 - std::pow(0.9, epoch);
        double bc2 = 1.0 - std::pow(0.999, epoch);
        for (auto& [name, p] : params) {
            const Mat& g = tape.grad(nodes[name]);
            Mat& mm = ms[name];
            Mat& vv = vs[name];
            mm = 0.9 * mm + 0.1 * g;
            vv = 0.999 * vv + 0.001 * g.cwiseProduct(g);
            *p -= spec.lr * (mm / bc1).cwiseQuotient(
                                (vv / bc2).cwiseSqrt() + Mat::Constant(p->rows(), p->cols(), 1e-8));
        }
    }
}

void evaluate(const Mlp& m, const Mat& x, const Mat& y, FusionTask task,
              ClassificationReport* cls, RegressionReport* reg) {
    Mat scores = mlp_scores(m, x);
    if (task == FusionTask::Classification) {
        std::vector<int> preds, golds;
        for (Eigen::Index i = 0; i < scores.rows(); ++i) {
            preds.push_back(scores(i, 0) > 0.0 ? 1 : 0);  // sigmoid(0) = 0.5
            golds.push_back(y(i, 0) > 0.5 ? 1 : 0);
        }
        *cls = classification_metrics(preds, golds, 1);
    } else {
        std::vector<double> preds, golds;
        for (Eigen::Index i = 0; i < scores.rows(); ++i) {
            preds.push_back(scores(i, 0));
            golds.push_back(y(i, 0));
        }
        *reg = regression_metrics(preds, golds);
    }
}

}  // namespace

FusionOutcome fuse_and_train(const FeatureTable& task_features,
                             const FeatureTable& intent_features,
                             const std::map<std::string, double>& labels,
                             const std::vector<std::string>& train_ids,
                             const std::vector<std::string>& test_ids, const FusionSpec& spec) {
    FusionOutcome out;
    Mat y_train = label_column(labels, train_ids);
    Mat y_test = label_column(labels, test_ids);

    // fused run: task features concatenated with intent features
    Mat x_train = assemble(task_features, &intent_features, train_ids);
    Mat x_test = assemble(task_features, &intent_features, test_ids);
    out.fused_dim = static_cast<int>(x_train.cols());
    Mlp fused = init_mlp(x_train.cols(), spec.hidden, spec.seed);
    train_mlp(fused, x_train, y_train, spec.task, spec);
    evaluate(fused, x_test, y_test, spec.task, &out.fused_cls, &out.fused_reg);

    // control run: task features only, intent features never assembled
    Mat c_train = assemble(task_features, nullptr, train_ids);
    Mat c_test = assemble(task_features, nullptr, test_ids);
    out.control_dim = static_cast<int>(c_train.cols());
    Mlp control = init_mlp(c_train.cols(), spec.hidden, spec.seed);
    train_mlp(control, c_train, y_train, spec.task, spec);
    evaluate(control, c_test, y_test, spec.task, &out.control_cls, &out.control_reg);
    return out;
}

}  // namespace nint::evalkit
