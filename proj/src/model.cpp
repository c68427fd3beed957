#include "nint/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace nint::dmint {

using json = nlohmann::json;

Variant variant_from_name(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "full") return Variant::Full;
    if (s == "womve") return Variant::WoMVE;
    if (s == "woia") return Variant::WoIA;
    if (s == "wob") return Variant::WoB;
    if (s == "wod") return Variant::WoD;
    if (s == "wop") return Variant::WoP;
    throw Error("ConfigError", "unknown ablation variant '" + name + "'");
}

DmintConfig ablate(DmintConfig base, Variant variant) {
    switch (variant) {
        case Variant::Full: break;
        case Variant::WoMVE: base.use_mve = false; break;
        case Variant::WoIA: base.use_gate = false; break;
        case Variant::WoB: base.loss_enabled[0] = false; break;
        case Variant::WoD: base.loss_enabled[1] = false; break;
        case Variant::WoP: base.loss_enabled[2] = false; break;
    }
    return base;
}

namespace {

Mat randn(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = dist(rng);
    return m;
}

std::string lowercase(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

}  // namespace

ModelGraph ModelGraph::init(const DmintConfig& cfg) {
    ModelGraph g;
    g.cfg = cfg;
    const int d = cfg.encoder.d;
    std::mt19937_64 rng(cfg.init_seed);
    const double scale = 0.1;

    if (cfg.encoder.kind == EncoderKind::HashedNGram) {
        g.embedding = randn(rng, cfg.encoder.buckets + 1, d, 0.02);
    } else {
        std::ifstream in(cfg.encoder.table_file);
        if (!in) throw Error("TableLoadError", "cannot open '" + cfg.encoder.table_file + "'");
        std::vector<std::vector<double>> rows;
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream cells(line);
            std::string word;
            cells >> word;
            std::vector<double> vec;
            double v;
            while (cells >> v) vec.push_back(v);
            if (static_cast<int>(vec.size()) != d)
                throw Error("TableLoadError", "line " + std::to_string(line_no) + ": expected " +
                                                  std::to_string(d) + " values, got " +
                                                  std::to_string(vec.size()));
            g.table_index[lowercase(word)] = static_cast<int>(rows.size());
            rows.push_back(std::move(vec));
        }
        g.pretrained_table = Mat::Zero(static_cast<Eigen::Index>(rows.size()), d);
        for (size_t i = 0; i < rows.size(); ++i)
            for (int c = 0; c < d; ++c)
                g.pretrained_table(static_cast<Eigen::Index>(i), c) = rows[i][c];
    }

    const int dh = d / cfg.heads;
    if (dh * cfg.heads != d) throw Error("ConfigError", "embedding dim must divide by head count");
    for (auto& ext : g.extractors) {
        if (cfg.use_mve) {
            for (int h = 0; h < cfg.heads; ++h)
                ext.heads.push_back({randn(rng, d, dh, scale), randn(rng, d, dh, scale),
                                     randn(rng, d, dh, scale)});
            ext.wo = randn(rng, d, d, scale);
            ext.bo = Mat::Zero(1, d);
            for (int k : cfg.kernels) {
                ext.conv_w.push_back(randn(rng, static_cast<Eigen::Index>(k) * d, cfg.channels, scale));
                ext.conv_b.push_back(Mat::Zero(1, cfg.channels));
            }
            int pooled = cfg.channels * static_cast<int>(cfg.kernels.size());
            ext.proj_w = randn(rng, pooled, cfg.d_int, scale);
        } else {
            ext.proj_w = randn(rng, d, cfg.d_int, scale);
        }
        ext.proj_b = Mat::Zero(1, cfg.d_int);
    }
    g.gate.pool_q = randn(rng, d, 1, scale);
    g.gate.gate_w = randn(rng, d, 3, scale);
    g.gate.gate_b = Mat::Zero(1, 3);
    for (int t = 0; t < 4; ++t) {
        g.heads[t].w1 = randn(rng, cfg.d_int, cfg.hidden, scale);
        g.heads[t].b1 = Mat::Zero(1, cfg.hidden);
        g.heads[t].w2 = randn(rng, cfg.hidden, kTaskDims[t], scale);
        g.heads[t].b2 = Mat::Zero(1, kTaskDims[t]);
    }
    return g;
}

void ModelGraph::for_each_param(const std::function<void(const std::string&, Mat&)>& fn) {
    if (cfg.encoder.kind == EncoderKind::HashedNGram) fn("embedding", embedding);
    static const char* ext_names[3] = {"ext_b", "ext_d", "ext_p"};
    for (int t = 0; t < 3; ++t) {
        auto& ext = extractors[t];
        std::string base = ext_names[t];
        for (size_t h = 0; h < ext.heads.size(); ++h) {
            fn(base + ".attn" + std::to_string(h) + ".wq", ext.heads[h].wq);
            fn(base + ".attn" + std::to_string(h) + ".wk", ext.heads[h].wk);
            fn(base + ".attn" + std::to_string(h) + ".wv", ext.heads[h].wv);
        }
        if (cfg.use_mve) {
            fn(base + ".wo", ext.wo);
            fn(base + ".bo", ext.bo);
            for (size_t k = 0; k < ext.conv_w.size(); ++k) {
                fn(base + ".conv" + std::to_string(k) + ".w", ext.conv_w[k]);
                fn(base + ".conv" + std::to_string(k) + ".b", ext.conv_b[k]);
            }
        }
        fn(base + ".proj_w", ext.proj_w);
        fn(base + ".proj_b", ext.proj_b);
    }
    if (cfg.use_gate) {
        fn("gate.pool_q", gate.pool_q);
        fn("gate.w", gate.gate_w);
        fn("gate.b", gate.gate_b);
    }
    for (int t = 0; t < 4; ++t) {
        std::string base = std::string("head_") + kTaskNames[t];
        fn(base + ".w1", heads[t].w1);
        fn(base + ".b1", heads[t].b1);
        fn(base + ".w2", heads[t].w2);
        fn(base + ".b2", heads[t].b2);
    }
}

void ModelGraph::for_each_param(
    const std::function<void(const std::string&, const Mat&)>& fn) const {
    const_cast<ModelGraph*>(this)->for_each_param(
        [&](const std::string& name, Mat& m) { fn(name, m); });
}

TokenStream ModelGraph::tokenize(const NewsArticle& article) const {
    TokenStream s;
    auto push = [&](const std::string& tok) { s.tokens.push_back(lowercase(tok)); };
    for (const auto& t : whitespace_tokens(article.topic)) push(t);
    s.tokens.push_back("[sep]");
    for (const auto& t : whitespace_tokens(article.title)) push(t);
    for (const auto& t : whitespace_tokens(article.content)) push(t);
    if (static_cast<int>(s.tokens.size()) > cfg.max_tokens)
        s.tokens.resize(static_cast<size_t>(cfg.max_tokens));  // tail truncation
    for (const auto& tok : s.tokens) {
        if (tok == "[sep]")
            s.ids.push_back(cfg.encoder.buckets);
        else
            s.ids.push_back(static_cast<int>(fnv1a64(tok, cfg.encoder.seed) %
                                             static_cast<uint64_t>(cfg.encoder.buckets)));
    }
    s.mask.assign(s.tokens.size(), true);
    return s;
}

TokenMatrix ModelGraph::encode(const NewsArticle& article) const {
    TokenStream s = tokenize(article);
    TokenMatrix m;
    m.mask = s.mask;
    const int d = cfg.encoder.d;
    m.values = Mat::Zero(static_cast<Eigen::Index>(s.tokens.size()), d);
    for (size_t i = 0; i < s.tokens.size(); ++i) {
        if (cfg.encoder.kind == EncoderKind::HashedNGram) {
            m.values.row(static_cast<Eigen::Index>(i)) = embedding.row(s.ids[i]);
        } else {
            auto it = table_index.find(s.tokens[i]);
            if (it != table_index.end())
                m.values.row(static_cast<Eigen::Index>(i)) = pretrained_table.row(it->second);
            // OOV rows stay zero
        }
    }
    return m;
}

ParamNodes insert_params(Tape& tape, ModelGraph& graph) {
    ParamNodes p;
    graph.for_each_param([&](const std::string& name, Mat& m) { p.node[name] = tape.input(m); });
    return p;
}

namespace {

int param(const ParamNodes& p, const std::string& name) {
    auto it = p.node.find(name);
    if (it == p.node.end()) throw Error("Internal", "missing parameter node '" + name + "'");
    return it->second;
}

// Global attention + multi-scale convolutions + masked mean-pool + projection.
int extractor_forward(Tape& tape, const ModelGraph& g, const ParamNodes& p,
                      const std::string& base, int w_node, const Mask& mask) {
    const DmintConfig& cfg = g.cfg;
    int pooled;
    if (cfg.use_mve) {
        const int dh = cfg.encoder.d / cfg.heads;
        std::vector<int> head_outputs;
        for (int h = 0; h < cfg.heads; ++h) {
            std::string hb = base + ".attn" + std::to_string(h);
            int q = tape.matmul(w_node, param(p, hb + ".wq"));
            int k = tape.matmul(w_node, param(p, hb + ".wk"));
            int v = tape.matmul(w_node, param(p, hb + ".wv"));
            int scores = tape.scale(tape.matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(dh)));
            int attn = tape.softmax_masked_rows(scores, mask);
            head_outputs.push_back(tape.matmul(attn, v));
        }
        int ctx = tape.add_rowvec(tape.matmul(tape.concat_cols(head_outputs), param(p, base + ".wo")),
                                  param(p, base + ".bo"));
        int ctx_z = tape.zero_masked_rows(ctx, mask);
        std::vector<int> conv_outputs;
        for (size_t k = 0; k < cfg.kernels.size(); ++k)
            conv_outputs.push_back(tape.conv1d_same(ctx_z, param(p, base + ".conv" + std::to_string(k) + ".w"),
                                                    param(p, base + ".conv" + std::to_string(k) + ".b"),
                                                    cfg.kernels[k]));
        pooled = tape.masked_mean_rows(tape.concat_cols(conv_outputs), mask);
    } else {
        pooled = tape.masked_mean_rows(w_node, mask);
    }
    return tape.add_rowvec(tape.matmul(pooled, param(p, base + ".proj_w")),
                           param(p, base + ".proj_b"));
}

int head_forward(Tape& tape, const ParamNodes& p, const std::string& base, int f_node) {
    int h = tape.relu(tape.add_rowvec(tape.matmul(f_node, param(p, base + ".w1")),
                                      param(p, base + ".b1")));
    return tape.sigmoid(tape.add_rowvec(tape.matmul(h, param(p, base + ".w2")),
                                        param(p, base + ".b2")));
}

}  // namespace

ForwardNodes forward_embedded(Tape& tape, const ModelGraph& graph, const ParamNodes& params,
                              int w_node, const Mask& mask) {
    ForwardNodes out;
    out.w = w_node;
    out.f_belief = extractor_forward(tape, graph, params, "ext_b", w_node, mask);
    out.f_desire = extractor_forward(tape, graph, params, "ext_d", w_node, mask);
    out.f_plan = extractor_forward(tape, graph, params, "ext_p", w_node, mask);

    if (graph.cfg.use_gate) {
        int scores = tape.transpose(tape.matmul(w_node, param(params, "gate.pool_q")));
        int attn = tape.softmax_masked_rows(scores, mask);  // 1 x L
        int pooled = tape.matmul(attn, w_node);             // 1 x d
        int context = tape.masked_mean_rows(w_node, mask);  // E: global mean embedding
        int fg = tape.add(pooled, context);
        int logits = tape.add_rowvec(tape.matmul(fg, param(params, "gate.w")),
                                     param(params, "gate.b"));
        out.gate_weights = tape.softmax_masked_rows(logits, Mask(3, true));
    } else {
        out.gate_weights = tape.input((Mat(1, 3) << 1.0 / 3, 1.0 / 3, 1.0 / 3).finished());
    }
    out.f_intent = tape.convex_combine(out.gate_weights,
                                       {out.f_belief, out.f_desire, out.f_plan});

    std::array<int, 4> features{out.f_belief, out.f_desire, out.f_plan, out.f_intent};
    for (int t = 0; t < 4; ++t)
        out.outputs[t] = head_forward(tape, params, std::string("head_") + kTaskNames[t],
                                      features[t]);
    return out;
}

ForwardNodes forward(Tape& tape, const ModelGraph& graph, const ParamNodes& params,
                     const TokenStream& stream) {
    int w_node;
    if (graph.cfg.encoder.kind == EncoderKind::HashedNGram) {
        w_node = tape.gather_rows(param(params, "embedding"), stream.ids);
    } else {
        Mat values = Mat::Zero(static_cast<Eigen::Index>(stream.tokens.size()), graph.cfg.encoder.d);
        for (size_t i = 0; i < stream.tokens.size(); ++i) {
            auto it = graph.table_index.find(stream.tokens[i]);
            if (it != graph.table_index.end())
                values.row(static_cast<Eigen::Index>(i)) = graph.pretrained_table.row(it->second);
        }
        w_node = tape.input(std::move(values));
    }
    return forward_embedded(tape, graph, params, w_node, stream.mask);
}

int example_loss(Tape& tape, const ModelGraph& graph, const ForwardNodes& fwd,
                 const LabelTensor& target) {
    auto to_row = [](const std::vector<double>& v) {
        Mat m(1, static_cast<Eigen::Index>(v.size()));
        for (size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
        return m;
    };
    std::array<Mat, 4> targets{to_row(target.belief), to_row(target.desire), to_row(target.plan),
                               to_row(target.polarity)};
    std::vector<int> terms;
    for (int t = 0; t < 4; ++t)
        if (graph.cfg.loss_enabled[t]) terms.push_back(tape.bce_sum(fwd.outputs[t], targets[t]));
    return tape.add_scalars(terms);
}

Prediction predict(const ModelGraph& graph, const NewsArticle& article) {
    Tape tape;
    ModelGraph& g = const_cast<ModelGraph&>(graph);
    ParamNodes params = insert_params(tape, g);
    TokenStream stream = graph.tokenize(article);
    ForwardNodes fwd = forward(tape, graph, params, stream);
    Prediction pred;
    auto argmax = [&](int node) {
        const Mat& m = tape.value(node);
        Eigen::Index best = 0;
        m.row(0).maxCoeff(&best);
        return static_cast<int>(best);
    };
    pred.belief = argmax(fwd.outputs[0]);
    const Mat& desire = tape.value(fwd.outputs[1]);
    for (Eigen::Index i = 0; i < desire.cols(); ++i)
        if (desire(0, i) > 0.5) pred.desires.push_back(static_cast<int>(i));
    pred.plan = argmax(fwd.outputs[2]);
    pred.polarity = argmax(fwd.outputs[3]);
    return pred;
}

// ---- checkpointing -------------------------------------------------------

namespace {

json mat_to_json(const Mat& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data(static_cast<size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            data[static_cast<size_t>(r * m.cols() + c)] = m(r, c);
    j["data"] = data;
    return j;
}

Mat mat_from_json(const json& j) {
    Eigen::Index rows = j.at("rows"), cols = j.at("cols");
    std::vector<double> data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw Error("CheckpointError", "tensor data length mismatch");
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r * cols + c)];
    return m;
}

json config_to_json(const DmintConfig& cfg) {
    return json{{"encoder_kind", cfg.encoder.kind == EncoderKind::HashedNGram ? "hashed" : "table"},
                {"buckets", cfg.encoder.buckets},
                {"d", cfg.encoder.d},
                {"encoder_seed", cfg.encoder.seed},
                {"table_file", cfg.encoder.table_file},
                {"d_int", cfg.d_int},
                {"heads", cfg.heads},
                {"hidden", cfg.hidden},
                {"kernels", cfg.kernels},
                {"channels", cfg.channels},
                {"max_tokens", cfg.max_tokens},
                {"init_seed", cfg.init_seed},
                {"use_mve", cfg.use_mve},
                {"use_gate", cfg.use_gate},
                {"loss_enabled", cfg.loss_enabled}};
}

DmintConfig config_from_json(const json& j) {
    DmintConfig cfg;
    cfg.encoder.kind =
        j.at("encoder_kind") == "hashed" ? EncoderKind::HashedNGram : EncoderKind::PretrainedTable;
    cfg.encoder.buckets = j.at("buckets");
    cfg.encoder.d = j.at("d");
    cfg.encoder.seed = j.at("encoder_seed");
    cfg.encoder.table_file = j.at("table_file");
    cfg.d_int = j.at("d_int");
    cfg.heads = j.at("heads");
    cfg.hidden = j.at("hidden");
    cfg.kernels = j.at("kernels").get<std::vector<int>>();
    cfg.channels = j.at("channels");
    cfg.max_tokens = j.at("max_tokens");
    cfg.init_seed = j.at("init_seed");
    cfg.use_mve = j.at("use_mve");
    cfg.use_gate = j.at("use_gate");
    auto le = j.at("loss_enabled").get<std::vector<bool>>();
    for (int t = 0; t < 4; ++t) cfg.loss_enabled[t] = le.at(t);
    return cfg;
}

}  // namespace

void save_checkpoint(const ModelGraph& graph, uint64_t vocab_hash, const std::string& path) {
    json j;
    j["format"] = "dmint-checkpoint";
    j["format_version"] = 1;
    j["vocab_hash"] = vocab_hash;
    j["config"] = config_to_json(graph.cfg);
    json tensors;
    graph.for_each_param([&](const std::string& name, const Mat& m) {
        tensors[name] = mat_to_json(m);
    });
    j["tensors"] = tensors;
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot write checkpoint '" + path + "'");
    out << j.dump();
}

ModelGraph load_checkpoint(const std::string& path, uint64_t* vocab_hash) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open checkpoint '" + path + "'");
    json j = json::parse(in);
    if (j.value("format", "") != "dmint-checkpoint" || j.value("format_version", 0) != 1)
        throw Error("CheckpointError", "unrecognized checkpoint header");
    if (vocab_hash) *vocab_hash = j.value("vocab_hash", 0ULL);
    ModelGraph g = ModelGraph::init(config_from_json(j.at("config")));
    const json& tensors = j.at("tensors");
    g.for_each_param([&](const std::string& name, Mat& m) {
        Mat loaded = mat_from_json(tensors.at(name));
        if (loaded.rows() != m.rows() || loaded.cols() != m.cols())
            throw Error("CheckpointError", "tensor shape mismatch for '" + name + "'");
        m = loaded;
    });
    return g;
}

}  // namespace nint::dmint
