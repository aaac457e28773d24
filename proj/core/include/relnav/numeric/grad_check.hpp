#pragma once

#include <functional>
#include <string>

#include "relnav/numeric/param_store.hpp"

namespace relnav::numeric {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t checked = 0;
};

// Central finite-difference check of a scalar objective against the
// analytic gradients the objective accumulates into the store.
//
// The callable contract: f(store) evaluates the objective at the store's
// current parameter values, accumulates d(objective)/d(param) into the
// store's gradient slots (zeroed by the checker beforehand) and returns the
// objective value. The checker then perturbs every parameter entry by +-h
// and reports max over entries of
//   |analytic - central_difference| / max(1, |central_difference|).
// A non-finite objective value raises ContractError naming the parameter
// being perturbed.
GradCheckReport grad_check(const std::function<double(ParamStore&)>& f, ParamStore& params,
                           double h = 1e-4);

}  // namespace relnav::numeric
