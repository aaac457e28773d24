#include "relnav/loss/losses.hpp"

#include <algorithm>
#include <cmath>

#include "relnav/common/error.hpp"

namespace relnav::loss {

using numeric::Graph;
using numeric::Var;

double tbp_value(const std::vector<double>& probabilities, const std::vector<double>& revisit) {
  if (probabilities.size() != revisit.size()) {
    throw ShapeError("tbp_value: " + std::to_string(probabilities.size()) +
                     " probabilities vs " + std::to_string(revisit.size()) + " distances");
  }
  if (probabilities.empty()) return 0.0;
  double mx = probabilities[0];
  for (double p : probabilities) mx = std::max(mx, p);
  double denom = 0.0;
  for (double p : probabilities) denom += std::exp(p - mx);
  double value = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    value += std::exp(probabilities[i] - mx) / denom * revisit[i];
  }
  return value;
}

std::vector<double> tbp_gradient(const std::vector<double>& probabilities,
                                 const std::vector<double>& revisit) {
  const double value = tbp_value(probabilities, revisit);
  std::vector<double> grad(probabilities.size(), 0.0);
  if (probabilities.empty()) return grad;
  double mx = probabilities[0];
  for (double p : probabilities) mx = std::max(mx, p);
  double denom = 0.0;
  for (double p : probabilities) denom += std::exp(p - mx);
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double w = std::exp(probabilities[i] - mx) / denom;
    grad[i] = w * (revisit[i] - value);
  }
  return grad;
}

Var tbp_loss(Graph& g, Var probability_row, const std::vector<double>& revisit) {
  if (revisit.empty()) return g.constant_scalar(0.0);
  return g.softmax_weighted_sum(probability_row, revisit);
}

Var sap_step_loss(Graph& g, Var probability_row, std::size_t expert_index) {
  return g.neg_log_pick(probability_row, expert_index, 1e-12);
}

Var og_loss(Graph& g, Var object_logits, std::optional<std::size_t> target_index) {
  if (!target_index.has_value()) return g.constant_scalar(kMissingObjectPenalty);
  return g.neg_log_pick(g.row_softmax(object_logits), *target_index, 1e-12);
}

Var total_loss(Graph& g, Var sap, Var og, Var tbp, const LossWeights& w) {
  const char* names[3] = {"SAP", "OG", "TBP"};
  const Var parts[3] = {sap, og, tbp};
  for (int i = 0; i < 3; ++i) {
    if (!parts[i].defined() || !std::isfinite(parts[i].scalar())) {
      throw ContractError(std::string("total_loss: non-finite ") + names[i] + " component");
    }
  }
  Var out = g.scale(sap, w.sap);
  out = g.add(out, g.scale(og, w.og));
  if (w.tbp != 0.0) out = g.add(out, g.scale(tbp, w.tbp));
  return out;
}

}  // namespace relnav::loss
