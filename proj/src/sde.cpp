#include "measurefit/sde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

namespace measurefit {

ScalarFunctionSpec::ScalarFunctionSpec(expr::Expr e, expr::Bindings bindings)
    : expr_(std::move(e)), bindings_(std::move(bindings)) {
  label_ = expr_->source();
}

ScalarFunctionSpec::ScalarFunctionSpec(std::function<double(double)> fn,
                                       std::string label)
    : fn_(std::move(fn)), label_(std::move(label)) {}

ScalarFunctionSpec ScalarFunctionSpec::from_samples(const Grid1D& grid,
                                                    std::vector<double> values,
                                                    std::string label) {
  if (values.size() != grid.n)
    throw NumericError("from_samples: value count does not match grid");
  auto data = std::make_shared<std::vector<double>>(std::move(values));
  auto fn = [grid, data](double x) {
    const auto& v = *data;
    const double h = grid.spacing();
    double k = (x - grid.lo) / h;
    if (k <= 0.0) return v.front();
    if (k >= static_cast<double>(grid.n - 1)) return v.back();
    const auto i = static_cast<std::size_t>(k);
    const double w = k - static_cast<double>(i);
    return (1.0 - w) * v[i] + w * v[i + 1];
  };
  return ScalarFunctionSpec(std::move(fn), std::move(label));
}

double ScalarFunctionSpec::operator()(double x) const {
  if (expr_) return expr_->evaluate(x, bindings_);
  return fn_(x);
}

std::vector<std::string> ScalarFunctionSpec::unbound_params() const {
  std::vector<std::string> out;
  if (!expr_) return out;
  for (const auto& p : expr_->free_params())
    if (!bindings_.contains(p)) out.push_back(p);
  return out;
}

ScalarFunctionSpec ScalarFunctionSpec::with_binding(const std::string& name,
                                                    double value) const {
  ScalarFunctionSpec copy = *this;
  if (copy.expr_) copy.bindings_[name] = value;
  return copy;
}

std::vector<double> ScalarFunctionSpec::tabulate(const Grid1D& grid) const {
  std::vector<double> out(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    out[i] = (*this)(grid.node(i));
    if (!std::isfinite(out[i]))
      throw NumericError("'" + label_ + "' is non-finite at x = " +
                         std::to_string(grid.node(i)));
  }
  return out;
}

void SdeModel::validate_on(const Grid1D& grid) const {
  drift.tabulate(grid);
  const std::vector<double> sig = diffusion.tabulate(grid);
  bool negative = false;
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (std::abs(sig[i]) < kSigmaFloor)
      throw NumericError("diffusion '" + diffusion.label() +
                         "' vanishes at x = " + std::to_string(grid.node(i)));
    negative = negative || sig[i] < 0.0;
  }
  if (negative)
    warn("diffusion '" + diffusion.label() +
         "' takes negative values; only |sigma| enters the computation");
}

SdeFamily::SdeFamily(SdeModel prototype_, std::string parameter_,
                     double theta_lo_, double theta_hi_)
    : prototype(std::move(prototype_)),
      parameter(std::move(parameter_)),
      theta_lo(theta_lo_),
      theta_hi(theta_hi_) {
  if (!(theta_lo < theta_hi) || !std::isfinite(theta_lo) ||
      !std::isfinite(theta_hi))
    throw NumericError("family: parameter range must be finite with lo < hi");
  auto check = [&](const ScalarFunctionSpec& f, const char* which) {
    for (const auto& p : f.unbound_params())
      if (p != parameter)
        throw NumericError(std::string("family ") + which +
                           ": unbound parameter '" + p +
                           "' is not the family parameter '" + parameter + "'");
  };
  check(prototype.drift, "drift");
  check(prototype.diffusion, "diffusion");
}

SdeModel instantiate(const SdeFamily& family, double theta,
                     const Grid1D& grid) {
  if (!(theta >= family.theta_lo && theta <= family.theta_hi))
    throw NumericError("instantiate: theta " + std::to_string(theta) +
                       " outside range [" + std::to_string(family.theta_lo) +
                       ", " + std::to_string(family.theta_hi) + "]");
  SdeModel model{family.prototype.drift.with_binding(family.parameter, theta),
                 family.prototype.diffusion.with_binding(family.parameter,
                                                         theta)};
  model.validate_on(grid);
  return model;
}

}  // namespace measurefit
