#pragma once

#include "relnav/numeric/graph.hpp"
#include "relnav/numeric/rng.hpp"
#include "relnav/text/instruction.hpp"
#include "relnav/text/vocabulary.hpp"

namespace relnav::text {

struct TextEncoderConfig {
  int d_model = 32;
  int max_len = 24;
};

// Registers token/positional embedding tables, the single self-attention
// layer and the instruction pooling head.
void init_text_params(numeric::ParamStore& store, const Vocabulary& vocab,
                      const TextEncoderConfig& cfg, numeric::Rng& rng);

// Contextual noun representations: one self-attention layer over
// token + positional embeddings of the extracted nouns. Output is
// (noun count) x d_model and differentiable through every table.
numeric::Var encode_nouns(numeric::Graph& g, numeric::ParamStore& store,
                          const NounExtraction& nouns, const TextEncoderConfig& cfg);

// Pooled instruction vector u: mean of token + positional embeddings
// followed by an affine head. 1 x d_model.
numeric::Var encode_instruction(numeric::Graph& g, numeric::ParamStore& store,
                                const Instruction& instr, const TextEncoderConfig& cfg);

}  // namespace relnav::text
