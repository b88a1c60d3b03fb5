#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "measurefit/density.hpp"
#include "measurefit/expr.hpp"

namespace measurefit {

/// A scalar function of x: either a parsed expression with parameter
/// bindings, or a host-provided callback. Used for drifts, diffusions and
/// observation densities.
class ScalarFunctionSpec {
public:
  ScalarFunctionSpec(expr::Expr e, expr::Bindings bindings = {});
  explicit ScalarFunctionSpec(std::function<double(double)> fn,
                              std::string label = "<callback>");

  /// Callback that linearly interpolates sampled values; exact at the nodes.
  static ScalarFunctionSpec from_samples(const Grid1D& grid,
                                         std::vector<double> values,
                                         std::string label = "<samples>");

  double operator()(double x) const;

  /// Parameters of the expression not covered by the bindings (empty for
  /// callbacks).
  std::vector<std::string> unbound_params() const;

  ScalarFunctionSpec with_binding(const std::string& name, double value) const;

  /// Evaluate at every node; throws NumericError on a non-finite result.
  std::vector<double> tabulate(const Grid1D& grid) const;

  const std::string& label() const noexcept { return label_; }

private:
  std::optional<expr::Expr> expr_;
  expr::Bindings bindings_;
  std::function<double(double)> fn_;
  std::string label_;
};

/// dX = b(X) dt + σ(X) dB. σ may not vanish on the working grid
/// (|σ| ≥ 1e-8); a negative σ is accepted with a warning since only σ²
/// enters the downstream formulas.
struct SdeModel {
  ScalarFunctionSpec drift;
  ScalarFunctionSpec diffusion;

  /// Check both coefficients at every node of the working grid.
  void validate_on(const Grid1D& grid) const;
};

inline constexpr double kSigmaFloor = 1e-8;

/// One-parameter family θ ↦ SdeModel over a finite range.
struct SdeFamily {
  SdeFamily(SdeModel prototype, std::string parameter, double theta_lo,
            double theta_hi);

  SdeModel prototype;  ///< exactly one unbound parameter: `parameter`
  std::string parameter;
  double theta_lo;
  double theta_hi;
};

/// Bind the family parameter and re-check the model on the working grid.
SdeModel instantiate(const SdeFamily& family, double theta, const Grid1D& grid);

}  // namespace measurefit
