#include "relnav/numeric/grad_check.hpp"

#include <cmath>
#include <map>

#include "relnav/common/error.hpp"

namespace relnav::numeric {

GradCheckReport grad_check(const std::function<double(ParamStore&)>& f, ParamStore& params,
                           double h) {
  params.zero_grads();
  const double f0 = f(params);
  if (!std::isfinite(f0)) {
    throw ContractError("grad_check: objective is non-finite at the base point");
  }

  // Snapshot analytic gradients before the perturbation passes clobber them.
  std::map<std::string, Tensor2> analytic;
  for (const std::string& name : params.names()) analytic.emplace(name, params.grad(name));

  GradCheckReport report;
  for (const std::string& name : params.names()) {
    Tensor2& value = params.value(name);
    const Tensor2& a = analytic.at(name);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];

      value[i] = saved + h;
      params.zero_grads();
      const double f_plus = f(params);

      value[i] = saved - h;
      params.zero_grads();
      const double f_minus = f(params);

      value[i] = saved;
      if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
        throw ContractError("grad_check: non-finite objective while perturbing parameter " + name);
      }

      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double rel = std::fabs(a[i] - numeric) / std::max(1.0, std::fabs(numeric));
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = name;
      }
      ++report.checked;
    }
  }

  // Leave the store in the analytic-gradient state the caller produced.
  params.zero_grads();
  for (const std::string& name : params.names()) {
    Tensor2& g = params.grad(name);
    const Tensor2& a = analytic.at(name);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = a[i];
  }
  return report;
}

}  // namespace relnav::numeric
