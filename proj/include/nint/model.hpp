#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nint/canonical.hpp"
#include "nint/tape.hpp"
#include "nint/types.hpp"

namespace nint::dmint {

using ad::Mask;
using ad::Mat;
using ad::Tape;

enum class EncoderKind { HashedNGram, PretrainedTable };

struct EncoderSpec {
    EncoderKind kind = EncoderKind::HashedNGram;
    int buckets = 4096;
    int d = 64;
    uint64_t seed = 1234;
    std::string table_file;  // PretrainedTable mode
};

// Output of the text encoder: one embedding row per token plus a validity
// mask (false = padding).
struct TokenMatrix {
    Mat values;
    Mask mask;
};

// Token stream before embedding: topic tokens, separator, title+content
// tokens, truncated to max_tokens.
struct TokenStream {
    std::vector<std::string> tokens;
    std::vector<int> ids;  // hashed bucket per token (HashedNGram mode)
    Mask mask;
};

struct DmintConfig {
    EncoderSpec encoder;
    int d_int = 96;
    int heads = 2;
    int hidden = 384;  // classification-head hidden width
    std::vector<int> kernels{2, 3, 5};
    int channels = 32;
    int max_tokens = 512;
    uint64_t init_seed = 42;
    bool use_mve = true;   // false: extractor = masked mean + projection
    bool use_gate = true;  // false: fixed uniform (1/3,1/3,1/3) weights
    // which task losses contribute to the total (belief, desire, plan, intent)
    std::array<bool, 4> loss_enabled{true, true, true, true};
};

enum class Variant { Full, WoMVE, WoIA, WoB, WoD, WoP };
Variant variant_from_name(const std::string& name);  // "womve", "woia", ...
DmintConfig ablate(DmintConfig base, Variant variant);

// Task output widths: belief 3, desire 4, plan 2, intent polarity 2.
constexpr std::array<int, 4> kTaskDims{3, 4, 2, 2};
constexpr std::array<const char*, 4> kTaskNames{"belief", "desire", "plan", "intent"};

struct AttentionHead {
    Mat wq, wk, wv;  // d x dh
};

struct ExtractorParams {
    std::vector<AttentionHead> heads;
    Mat wo, bo;                       // d x d, 1 x d
    std::vector<Mat> conv_w, conv_b;  // per kernel: (k*d) x c, 1 x c
    Mat proj_w, proj_b;               // pooled -> d_int
};

struct GateParams {
    Mat pool_q;        // d x 1, attention-pooling query
    Mat gate_w, gate_b;  // d x 3, 1 x 3
};

struct HeadParams {
    Mat w1, b1, w2, b2;  // d_int -> hidden -> task dim
};

struct ModelGraph {
    DmintConfig cfg;
    Mat embedding;  // (buckets+1) x d; last row is the separator (hashed mode)
    Mat pretrained_table;  // PretrainedTable mode; not trained
    std::map<std::string, int> table_index;
    std::array<ExtractorParams, 3> extractors;  // B, D, P
    GateParams gate;
    std::array<HeadParams, 4> heads;  // B, D, P, I

    static ModelGraph init(const DmintConfig& cfg);

    // Visit every trainable parameter matrix with a stable name.
    void for_each_param(const std::function<void(const std::string&, Mat&)>& fn);
    void for_each_param(const std::function<void(const std::string&, const Mat&)>& fn) const;

    TokenStream tokenize(const NewsArticle& article) const;
    TokenMatrix encode(const NewsArticle& article) const;  // current embeddings
};

// Parameter leaves shared by every example on one tape.
struct ParamNodes {
    std::map<std::string, int> node;
};
ParamNodes insert_params(Tape& tape, ModelGraph& graph);

struct ForwardNodes {
    int w = -1;                         // token-matrix node (grad = attribution input)
    int f_belief = -1, f_desire = -1, f_plan = -1, f_intent = -1;
    int gate_weights = -1;              // 1 x 3 simplex
    std::array<int, 4> outputs{-1, -1, -1, -1};  // sigmoid predictions per task
};

// Full forward pass for one example. `stream` must come from
// graph.tokenize(); in PretrainedTable mode pass the embedded matrix via
// `pretrained` (ids are ignored).
ForwardNodes forward(Tape& tape, const ModelGraph& graph, const ParamNodes& params,
                     const TokenStream& stream);
ForwardNodes forward_embedded(Tape& tape, const ModelGraph& graph, const ParamNodes& params,
                              int w_node, const Mask& mask);

// Summed BCE per task (no averaging over categories); total is
// the sum of the enabled task losses.
int example_loss(Tape& tape, const ModelGraph& graph, const ForwardNodes& fwd,
                 const LabelTensor& target);

// Prediction rule: argmax for single-label tasks, threshold 0.5 for desire.
struct Prediction {
    int belief = 0;
    std::vector<int> desires;
    int plan = 0;
    int polarity = 0;
};
Prediction predict(const ModelGraph& graph, const NewsArticle& article);

// Checkpoint: single self-describing JSON file (versioned header, config
// echo, vocabulary hash, named tensors with shapes).
void save_checkpoint(const ModelGraph& graph, uint64_t vocab_hash, const std::string& path);
ModelGraph load_checkpoint(const std::string& path, uint64_t* vocab_hash = nullptr);

}  // namespace nint::dmint
