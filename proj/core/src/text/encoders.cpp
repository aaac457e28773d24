#include "relnav/text/encoders.hpp"

#include <cmath>

#include "relnav/common/error.hpp"

namespace relnav::text {

using numeric::Graph;
using numeric::ParamStore;
using numeric::Rng;
using numeric::Var;

void init_text_params(ParamStore& store, const Vocabulary& vocab, const TextEncoderConfig& cfg,
                      Rng& rng) {
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const double attn_scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
  store.create_normal("text.token_embed", static_cast<std::size_t>(vocab.size()), d, rng, 0.3);
  store.create_normal("text.pos_embed", static_cast<std::size_t>(cfg.max_len), d, rng, 0.3);
  for (const char* name : {"text.wq", "text.wk", "text.wv"}) {
    store.create_normal(name, d, d, rng, attn_scale);
  }
  store.create_zeros("text.bq", 1, d);
  store.create_zeros("text.bk", 1, d);
  store.create_zeros("text.bv", 1, d);
  store.create_normal("text.pool_w", d, d, rng, attn_scale);
  store.create_zeros("text.pool_b", 1, d);
}

namespace {

Var embed_tokens(Graph& g, ParamStore& store, const std::vector<int>& tokens,
                 const std::vector<int>& positions, const TextEncoderConfig& cfg) {
  std::vector<std::size_t> tok_idx, pos_idx;
  tok_idx.reserve(tokens.size());
  pos_idx.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (positions[i] < 0 || positions[i] >= cfg.max_len) {
      throw ContractError("encode: token position " + std::to_string(positions[i]) +
                          " exceeds the positional table (max_len " +
                          std::to_string(cfg.max_len) + ")");
    }
    tok_idx.push_back(static_cast<std::size_t>(tokens[i]));
    pos_idx.push_back(static_cast<std::size_t>(positions[i]));
  }
  Var tok = g.gather_rows(g.param(store, "text.token_embed"), tok_idx);
  Var pos = g.gather_rows(g.param(store, "text.pos_embed"), pos_idx);
  return g.add(tok, pos);
}

}  // namespace

Var encode_nouns(Graph& g, ParamStore& store, const NounExtraction& nouns,
                 const TextEncoderConfig& cfg) {
  if (nouns.empty()) throw ContractError("encode_nouns: at least one noun is required");
  Var x = embed_tokens(g, store, nouns.categories, nouns.positions, cfg);
  Var q = g.affine(x, g.param(store, "text.wq"), g.param(store, "text.bq"));
  Var k = g.affine(x, g.param(store, "text.wk"), g.param(store, "text.bk"));
  Var v = g.affine(x, g.param(store, "text.wv"), g.param(store, "text.bv"));
  Var attn = g.row_softmax(g.scale(g.matmul_nt(q, k), 1.0 / std::sqrt(double(cfg.d_model))));
  return g.matmul(attn, v);
}

Var encode_instruction(Graph& g, ParamStore& store, const Instruction& instr,
                       const TextEncoderConfig& cfg) {
  if (instr.tokens.empty()) throw ContractError("encode_instruction: empty instruction");
  (void)cfg;
  // Bag-of-words pooling: a mean of token embeddings, so identical tokens
  // pool to their own encoding and token order cannot matter.
  std::vector<std::size_t> idx;
  idx.reserve(instr.tokens.size());
  for (int t : instr.tokens) idx.push_back(static_cast<std::size_t>(t));
  Var x = g.gather_rows(g.param(store, "text.token_embed"), idx);
  return g.affine(g.mean_rows(x), g.param(store, "text.pool_w"), g.param(store, "text.pool_b"));
}

}  // namespace relnav::text
