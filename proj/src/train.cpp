#include "nint/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nint/metrics.hpp"

namespace nint::dmint {

LabelTensor article_target(const NewsArticle& a) {
    if (a.annotations.empty())
        throw Error("MissingLabels", "article '" + a.id + "' has no annotations");
    return label_tensor(a.annotations.front());
}

double compute_loss_and_grads(ModelGraph& graph, const std::vector<const NewsArticle*>& batch,
                              std::map<std::string, Mat>* grads) {
    if (batch.empty()) throw Error("EmptyInput", "empty batch");
    Tape tape;
    ParamNodes params = insert_params(tape, graph);
    std::vector<int> losses;
    for (const NewsArticle* a : batch) {
        TokenStream stream = graph.tokenize(*a);
        ForwardNodes fwd = forward(tape, graph, params, stream);
        losses.push_back(example_loss(tape, graph, fwd, article_target(*a)));
    }
    int total = tape.scale(tape.add_scalars(losses), 1.0 / static_cast<double>(batch.size()));
    double loss = tape.value(total)(0, 0);
    if (grads) {
        tape.backward(total);
        for (const auto& [name, node] : params.node) {
            const Mat& g = tape.grad(node);
            if (!g.allFinite())
                throw Error("NonFiniteGradient", "non-finite gradient in parameter '" + name + "'");
            (*grads)[name] = g;
        }
    }
    return loss;
}

double mean_total_loss(const ModelGraph& graph, const Corpus& corpus) {
    std::vector<const NewsArticle*> all;
    for (const auto& a : corpus.articles) all.push_back(&a);
    return compute_loss_and_grads(const_cast<ModelGraph&>(graph), all, nullptr);
}

double polarity_macro_f1(const ModelGraph& graph, const Corpus& corpus) {
    std::vector<int> preds, golds;
    for (const auto& a : corpus.articles) {
        preds.push_back(predict(graph, a).polarity);
        golds.push_back(static_cast<int>(a.annotations.front().polarity.polarity));
    }
    return evalkit::classification_metrics(preds, golds).macro_f1;
}

TrainResult train(ModelGraph graph, const Corpus& train_set, const Corpus& val_set,
                  const TrainConfig& cfg, uint64_t vocab_hash) {
    TrainResult result;
    std::map<std::string, Mat> m_state, v_state;
    graph.for_each_param([&](const std::string& name, Mat& p) {
        m_state[name] = Mat::Zero(p.rows(), p.cols());
        v_state[name] = Mat::Zero(p.rows(), p.cols());
    });

    std::vector<size_t> order(train_set.articles.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed);

    std::map<std::string, Mat> best_params;
    long step = 0;
    int since_best = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        size_t batches = 0;
        for (size_t at = 0; at < order.size(); at += static_cast<size_t>(cfg.batch)) {
            std::vector<const NewsArticle*> batch;
            for (size_t i = at; i < std::min(order.size(), at + static_cast<size_t>(cfg.batch)); ++i)
                batch.push_back(&train_set.articles[order[i]]);
            std::map<std::string, Mat> grads;
            epoch_loss += compute_loss_and_grads(graph, batch, &grads);
            ++batches;
            ++step;
            double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            graph.for_each_param([&](const std::string& name, Mat& p) {
                const Mat& g = grads.at(name);
                Mat& m = m_state[name];
                Mat& v = v_state[name];
                m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
                v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
                Mat m_hat = m / bc1;
                Mat v_hat = v / bc2;
                p -= cfg.lr * m_hat.cwiseQuotient(
                                  v_hat.cwiseSqrt() + Mat::Constant(p.rows(), p.cols(), cfg.eps));
            });
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = batches ? epoch_loss / static_cast<double>(batches) : 0.0;
        rec.val_polarity_macro_f1 =
            val_set.articles.empty() ? 0.0 : polarity_macro_f1(graph, val_set);
        result.history.push_back(rec);

        if (result.best_epoch < 0 || rec.val_polarity_macro_f1 > result.best_val_f1) {
            result.best_epoch = epoch;
            result.best_val_f1 = rec.val_polarity_macro_f1;
            best_params.clear();
            graph.for_each_param([&](const std::string& name, Mat& p) { best_params[name] = p; });
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }

    if (!best_params.empty())
        graph.for_each_param([&](const std::string& name, Mat& p) { p = best_params.at(name); });
    result.graph = std::move(graph);
    if (!cfg.checkpoint_path.empty())
        save_checkpoint(result.graph, vocab_hash, cfg.checkpoint_path);
    return result;
}

IntentFeatures extract_features(const ModelGraph& graph, const NewsArticle& article) {
    Tape tape;
    ModelGraph& g = const_cast<ModelGraph&>(graph);
    ParamNodes params = insert_params(tape, g);
    TokenStream stream = graph.tokenize(article);
    ForwardNodes fwd = forward(tape, graph, params, stream);
    auto row = [&](int node) {
        const Mat& m = tape.value(node);
        return std::vector<double>(m.data(), m.data() + m.size());
    };
    IntentFeatures f;
    f.belief = row(fwd.f_belief);
    f.desire = row(fwd.f_desire);
    f.plan = row(fwd.f_plan);
    f.intent = row(fwd.f_intent);
    f.gate = row(fwd.gate_weights);
    return f;
}

}  // namespace nint::dmint
