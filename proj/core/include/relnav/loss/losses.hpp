#pragma once

#include <optional>
#include <vector>

#include "relnav/numeric/graph.hpp"

namespace relnav::loss {

struct LossWeights {
  double sap = 1.0;
  double og = 1.0;
  double tbp = 0.2;
};

// Penalty applied when the target object category is absent at the final
// node: keeps the combined objective defined on failed navigations.
inline constexpr double kMissingObjectPenalty = 27.631021115928547;  // ln(1e12)

// Turning-back penalty at one decision point: the softmax-weighted mean of
// revisit distances, with the softmax taken over the probability values
// themselves. Closed-form value; gradient d/dp_k = softmax(p)_k (d_k - L).
double tbp_value(const std::vector<double>& probabilities,
                 const std::vector<double>& revisit);
std::vector<double> tbp_gradient(const std::vector<double>& probabilities,
                                 const std::vector<double>& revisit);

// Graph node for the same quantity; empty candidate lists yield a constant
// zero. When `probabilities` has fewer entries than the candidate row, pass
// the matching slice.
numeric::Var tbp_loss(numeric::Graph& g, numeric::Var probability_row,
                      const std::vector<double>& revisit);

// -log p(expert) for one step; probabilities below 1e-12 are clamped (the
// graph counts clamp events).
numeric::Var sap_step_loss(numeric::Graph& g, numeric::Var probability_row,
                           std::size_t expert_index);

// -log softmax(scores)[target]; target absent yields the fixed penalty
// constant (no gradient, by design: there is nothing to ground).
numeric::Var og_loss(numeric::Graph& g, numeric::Var object_logits,
                     std::optional<std::size_t> target_index);

// lambda_1 L_SAP + lambda_2 L_OG + lambda_3 L_TBP. Non-finite components
// abort with the component name.
numeric::Var total_loss(numeric::Graph& g, numeric::Var sap, numeric::Var og, numeric::Var tbp,
                        const LossWeights& w);

}  // namespace relnav::loss
