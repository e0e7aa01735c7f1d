#include "hst/function_spec.hpp"

#include <cmath>

#include "hst/errors.hpp"
#include "hst/gauss_special.hpp"

namespace hst {

namespace {

void check_direction(const Eigen::VectorXd& d, int dimension) {
  if (d.size() != dimension)
    throw ContractError("direction dimension does not match the declared dimension");
  if (std::fabs(d.norm() - 1.0) > 1e-12)
    throw ContractError("direction must have unit norm (within 1e-12)");
}

Eigen::VectorXd normalized(Eigen::VectorXd d) {
  double n = d.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw ContractError("direction must be a nonzero finite vector");
  return d / n;
}

}  // namespace

FunctionSpec::FunctionSpec(int dimension, Variant variant)
    : dimension_(dimension), variant_(std::move(variant)) {
  if (dimension_ < 1) throw ContractError("dimension must be positive");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          check_direction(v.direction, dimension_);
          if (!std::isfinite(v.threshold)) throw ContractError("threshold must be finite");
        } else if constexpr (std::is_same_v<T, Slab>) {
          check_direction(v.direction, dimension_);
          if (!(v.lower < v.upper)) throw ContractError("slab requires lower < upper");
        } else if constexpr (std::is_same_v<T, UnionOfHalfspaces>) {
          if (v.parts.empty() || v.parts.size() > 8)
            throw ContractError("union size must lie in [1, 8]");
          for (const auto& h : v.parts) {
            check_direction(h.direction, dimension_);
            if (!std::isfinite(h.threshold))
              throw ContractError("threshold must be finite");
          }
        } else if constexpr (std::is_same_v<T, CenteredBall>) {
          if (!(v.radius > 0.0) || !std::isfinite(v.radius))
            throw ContractError("ball radius must be positive and finite");
        }
      },
      variant_);
}

FunctionSpec FunctionSpec::halfspace(Eigen::VectorXd direction, double threshold) {
  int n = static_cast<int>(direction.size());
  return FunctionSpec(n, Halfspace{std::move(direction), threshold});
}

FunctionSpec FunctionSpec::halfspace_with_volume(Eigen::VectorXd direction,
                                                 const Probability& volume) {
  // Vol{d.x >= theta} = upper tail of theta, so theta = -quantile(volume).
  double theta = -gaussian_quantile(volume);
  return halfspace(std::move(direction), theta);
}

FunctionSpec FunctionSpec::slab(Eigen::VectorXd direction, double lower, double upper) {
  int n = static_cast<int>(direction.size());
  return FunctionSpec(n, Slab{std::move(direction), lower, upper});
}

FunctionSpec FunctionSpec::centered_slab_with_volume(Eigen::VectorXd direction,
                                                     const Probability& volume) {
  double a = gaussian_quantile(Probability(0.5 * (1.0 + volume.value())));
  return slab(std::move(direction), -a, a);
}

FunctionSpec FunctionSpec::union_of_halfspaces(int dimension,
                                               std::vector<Halfspace> parts) {
  return FunctionSpec(dimension, UnionOfHalfspaces{std::move(parts)});
}

FunctionSpec FunctionSpec::centered_ball(int dimension, double radius) {
  return FunctionSpec(dimension, CenteredBall{radius});
}

FunctionSpec FunctionSpec::centered_ball_with_volume(int dimension,
                                                     const Probability& volume) {
  double r2 = chi_square_quantile(static_cast<double>(dimension), volume.value());
  return centered_ball(dimension, std::sqrt(r2));
}

FunctionSpec FunctionSpec::constant(int dimension, bool value) {
  return FunctionSpec(dimension, ConstantFn{value});
}

bool evaluate(const FunctionSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != spec.dimension())
    throw ContractError("point dimension does not match the function spec");
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          return v.direction.dot(x) >= v.threshold;
        } else if constexpr (std::is_same_v<T, Slab>) {
          double s = v.direction.dot(x);
          return s >= v.lower && s <= v.upper;
        } else if constexpr (std::is_same_v<T, UnionOfHalfspaces>) {
          for (const auto& h : v.parts)
            if (h.direction.dot(x) >= h.threshold) return true;
          return false;
        } else if constexpr (std::is_same_v<T, CenteredBall>) {
          return x.squaredNorm() <= v.radius * v.radius;
        } else {
          return v.value;
        }
      },
      spec.variant());
}

double exact_volume(const FunctionSpec& spec) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          return detail::norm_upper(v.threshold);
        } else if constexpr (std::is_same_v<T, Slab>) {
          // evaluate on whichever side keeps the difference tail-exact
          if (v.lower >= 0.0)
            return detail::norm_upper(v.lower) - detail::norm_upper(v.upper);
          if (v.upper <= 0.0)
            return detail::norm_lower(v.upper) - detail::norm_lower(v.lower);
          return detail::norm_lower(v.upper) - detail::norm_lower(v.lower);
        } else if constexpr (std::is_same_v<T, UnionOfHalfspaces>) {
          throw NoClosedForm(
              "union of halfspaces has no closed-form volume; use mc_volume");
        } else if constexpr (std::is_same_v<T, CenteredBall>) {
          return chi_square_cdf(spec.dimension(), v.radius * v.radius);
        } else {
          if (!v.value)
            throw EmptyPositiveSet("Constant(0) has empty positive set; SAMP undefined");
          return 1.0;  // admitted for estimator unit tests; testers gate on p <= 0.1
        }
      },
      spec.variant());
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
  auto vals = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

nlohmann::json FunctionSpec::to_json() const {
  nlohmann::json j;
  j["dimension"] = dimension_;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          j["variant"] = "halfspace";
          j["direction"] = vec_to_json(v.direction);
          j["threshold"] = v.threshold;
        } else if constexpr (std::is_same_v<T, Slab>) {
          j["variant"] = "slab";
          j["direction"] = vec_to_json(v.direction);
          j["lower"] = v.lower;
          j["upper"] = v.upper;
        } else if constexpr (std::is_same_v<T, UnionOfHalfspaces>) {
          j["variant"] = "union_of_halfspaces";
          nlohmann::json parts = nlohmann::json::array();
          for (const auto& h : v.parts)
            parts.push_back({{"direction", vec_to_json(h.direction)},
                             {"threshold", h.threshold}});
          j["halfspaces"] = parts;
        } else if constexpr (std::is_same_v<T, CenteredBall>) {
          j["variant"] = "centered_ball";
          j["radius"] = v.radius;
        } else {
          j["variant"] = "constant";
          j["value"] = v.value ? 1 : 0;
        }
      },
      variant_);
  return j;
}

FunctionSpec FunctionSpec::from_json(const nlohmann::json& j) {
  int n = j.at("dimension").get<int>();
  std::string variant = j.at("variant").get<std::string>();
  // directions are normalized on load
  if (variant == "halfspace") {
    return FunctionSpec(
        n, Halfspace{normalized(vec_from_json(j.at("direction"))),
                     j.at("threshold").get<double>()});
  }
  if (variant == "slab") {
    return FunctionSpec(n, Slab{normalized(vec_from_json(j.at("direction"))),
                                j.at("lower").get<double>(),
                                j.at("upper").get<double>()});
  }
  if (variant == "union_of_halfspaces") {
    UnionOfHalfspaces u;
    for (const auto& part : j.at("halfspaces"))
      u.parts.push_back(Halfspace{normalized(vec_from_json(part.at("direction"))),
                                  part.at("threshold").get<double>()});
    return FunctionSpec(n, std::move(u));
  }
  if (variant == "centered_ball")
    return FunctionSpec(n, CenteredBall{j.at("radius").get<double>()});
  if (variant == "constant")
    return FunctionSpec(n, ConstantFn{j.at("value").get<int>() != 0});
  throw ConfigError("variant", "unknown function variant '" + variant + "'");
}

}  // namespace hst
