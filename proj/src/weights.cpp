#include "treeprofile/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace treeprofile {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double falling_factorial(std::size_t k, int j) {
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= static_cast<double>(k) - i;
  return r;
}

double factorial(int j) {
  return std::tgamma(static_cast<double>(j) + 1.0);
}

// log of base_k; -inf when base_k == 0.
double log_base(Family f, std::size_t k) {
  const double kd = static_cast<double>(k);
  switch (f) {
    case Family::geometric: return 0.0;
    case Family::poisson: return -std::lgamma(kd + 1.0);
    case Family::linear: return std::log(kd + 1.0);
    case Family::logarithmic: return k == 0 ? -kInf : -std::log(kd);
    case Family::factorial: return std::lgamma(kd + 1.0);
    case Family::shifted_factorial: return k == 0 ? -kInf : std::lgamma(kd);
    case Family::table: break;
  }
  return -kInf;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::table: return "table";
    case Family::geometric: return "geometric";
    case Family::poisson: return "poisson";
    case Family::linear: return "linear";
    case Family::logarithmic: return "logarithmic";
    case Family::factorial: return "factorial";
    case Family::shifted_factorial: return "shifted_factorial";
  }
  return "?";
}

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw std::invalid_argument("unknown field '" + key + "' in " + where);
    }
  }
}

}  // namespace

WeightSequence::WeightSequence(WeightKind kind, Family family, double scale, double ratio,
                               std::vector<double> table)
    : kind_(kind), family_(family), scale_(scale), ratio_(ratio), table_(std::move(table)) {
  if (!(scale_ > 0.0) || !std::isfinite(scale_) || !(ratio_ > 0.0) || !std::isfinite(ratio_)) {
    throw std::invalid_argument("weight scale and ratio must be positive and finite");
  }
  if (family_ == Family::table) {
    if (table_.empty()) throw std::invalid_argument("table weights need at least one coefficient");
    for (double c : table_) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("weight coefficients must be nonnegative and finite");
      }
    }
    while (table_.size() > 1 && table_.back() == 0.0) table_.pop_back();
  } else if (!table_.empty()) {
    throw std::invalid_argument("only table weights carry explicit coefficients");
  }
}

WeightSequence WeightSequence::from_table(std::vector<double> coeffs, WeightKind kind) {
  return WeightSequence(kind, Family::table, 1.0, 1.0, std::move(coeffs));
}

WeightSequence WeightSequence::geometric(double q, double scale) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("geometric q must lie in (0,1)");
  return WeightSequence(WeightKind::rooted_phi, Family::geometric, scale * (1.0 - q), q);
}

WeightSequence WeightSequence::poisson(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson lambda must be positive");
  return WeightSequence(WeightKind::rooted_phi, Family::poisson, std::exp(-lambda), lambda);
}

WeightSequence WeightSequence::binary(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("binary q must lie in (0,1)");
  return from_table({(1.0 - q) * (1.0 - q), 2.0 * q * (1.0 - q), q * q});
}

WeightSequence WeightSequence::factorial_unrooted() {
  return WeightSequence(WeightKind::unrooted_w, Family::factorial, 1.0, 1.0);
}

WeightSequence WeightSequence::from_json(const nlohmann::json& spec) {
  if (spec.is_object() && spec.contains("family")) {
    // resolved form, as written by to_json
    check_keys(spec, {"kind", "family", "scale", "ratio", "table"}, "weight specification");
    const std::string kind = spec.value("kind", "rooted_phi");
    if (kind != "rooted_phi" && kind != "unrooted_w") {
      throw std::invalid_argument("unknown weight kind '" + kind + "'");
    }
    const std::string fam = spec.at("family").get<std::string>();
    for (Family f : {Family::table, Family::geometric, Family::poisson, Family::linear, Family::logarithmic,
                     Family::factorial, Family::shifted_factorial}) {
      if (fam != family_name(f)) continue;
      std::vector<double> table;
      if (f == Family::table) table = spec.at("table").get<std::vector<double>>();
      return WeightSequence(kind == "rooted_phi" ? WeightKind::rooted_phi : WeightKind::unrooted_w, f,
                            spec.value("scale", 1.0), spec.value("ratio", 1.0), std::move(table));
    }
    throw std::invalid_argument("unknown weight family '" + fam + "'");
  }
  check_keys(spec, {"kind", "params", "coeffs"}, "weight specification");
  if (!spec.contains("kind")) throw std::invalid_argument("weight specification needs 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  const nlohmann::json params = spec.value("params", nlohmann::json::object());
  const bool unrooted = params.is_object() && params.value("unrooted", false);
  if (kind != "table" && spec.contains("coeffs")) {
    throw std::invalid_argument("'coeffs' is only valid for kind 'table'");
  }

  auto result = [&]() -> WeightSequence {
    if (kind == "geometric") {
      check_keys(params, {"q", "scale", "unrooted"}, "geometric params");
      const double q = params.value("q", 0.5);
      const double scale = params.value("scale", 1.0);
      if (unrooted) {
        // w_k = scale (k-1)! q^k, whose vertex-marked rooted weights are geometric.
        if (!(q > 0.0)) throw std::invalid_argument("geometric q must be positive");
        return WeightSequence(WeightKind::unrooted_w, Family::shifted_factorial, scale, q);
      }
      return geometric(q, scale);
    }
    if (kind == "poisson") {
      check_keys(params, {"lambda", "unrooted"}, "poisson params");
      const double lambda = params.value("lambda", 1.0);
      if (unrooted) {
        // w_k = lambda^k; lambda = 1 gives uniform labelled trees.
        return WeightSequence(WeightKind::unrooted_w, Family::geometric, 1.0, lambda);
      }
      return poisson(lambda);
    }
    if (kind == "binary") {
      check_keys(params, {"q"}, "binary params");
      return binary(params.value("q", 0.5));
    }
    if (kind == "table") {
      check_keys(params, {"unrooted"}, "table params");
      if (!spec.contains("coeffs")) throw std::invalid_argument("table weights need 'coeffs'");
      return from_table(spec.at("coeffs").get<std::vector<double>>(),
                        unrooted ? WeightKind::unrooted_w : WeightKind::rooted_phi);
    }
    if (kind == "factorial_unrooted") {
      check_keys(params, {}, "factorial_unrooted params");
      return factorial_unrooted();
    }
    throw std::invalid_argument("unknown weight kind '" + kind + "'");
  }();

  if (result.kind() == WeightKind::rooted_phi) {
    bool branching = false;
    for (std::size_t k = 2; k < 64 && k <= result.max_index(); ++k) {
      branching = branching || result.coefficient(k) > 0.0;
    }
    if (!(result.coefficient(0) > 0.0) || !branching) {
      throw std::invalid_argument("rooted weights need phi_0 > 0 and phi_k > 0 for some k >= 2");
    }
  } else {
    bool branching = false;
    for (std::size_t k = 3; k < 64 && k <= result.max_index(); ++k) {
      branching = branching || result.coefficient(k) > 0.0;
    }
    if (!(result.coefficient(1) > 0.0) || !branching) {
      throw std::invalid_argument("unrooted weights need w_1 > 0 and w_k > 0 for some k >= 3");
    }
  }
  return result;
}

nlohmann::json WeightSequence::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_ == WeightKind::rooted_phi ? "rooted_phi" : "unrooted_w";
  j["family"] = family_name(family_);
  j["scale"] = scale_;
  j["ratio"] = ratio_;
  if (family_ == Family::table) j["table"] = table_;
  return j;
}

double WeightSequence::coefficient(std::size_t k) const {
  if (family_ == Family::table) {
    if (k >= table_.size() || table_[k] == 0.0) return 0.0;
    return scale_ * std::pow(ratio_, static_cast<double>(k)) * table_[k];
  }
  const double lb = log_base(family_, k);
  if (lb == -kInf) return 0.0;
  return std::exp(std::log(scale_) + static_cast<double>(k) * std::log(ratio_) + lb);
}

std::size_t WeightSequence::max_index() const {
  return family_ == Family::table ? table_.size() - 1 : std::numeric_limits<std::size_t>::max();
}

double WeightSequence::radius() const {
  switch (family_) {
    case Family::table:
    case Family::poisson: return kInf;
    case Family::geometric:
    case Family::linear:
    case Family::logarithmic: return 1.0 / ratio_;
    case Family::factorial:
    case Family::shifted_factorial: return 0.0;
  }
  return 0.0;
}

double WeightSequence::base_gf_derivative(int j, double s) const {
  switch (family_) {
    case Family::geometric: return factorial(j) / std::pow(1.0 - s, j + 1);
    case Family::poisson: return std::exp(s);
    case Family::linear: return factorial(j + 1) / std::pow(1.0 - s, j + 2);
    case Family::logarithmic:
      if (j == 0) return -std::log1p(-s);
      return factorial(j - 1) / std::pow(1.0 - s, j);
    default: break;
  }
  throw NumericalError("radius zero");
}

double WeightSequence::gf_derivative(int j, double s) const {
  if (j < 0) throw std::invalid_argument("negative derivative order");
  if (family_ == Family::table) {
    double sum = 0.0;
    for (std::size_t k = table_.size(); k-- > static_cast<std::size_t>(j);) {
      sum = sum * s + coefficient(k) * falling_factorial(k, j);
    }
    return sum;
  }
  const double r = radius();
  if (r == 0.0) throw NumericalError("radius zero");
  if (!(std::abs(s) < r)) throw NumericalError("moment diverges: argument outside radius of convergence");
  return scale_ * std::pow(ratio_, j) * base_gf_derivative(j, ratio_ * s);
}

std::size_t WeightSequence::span() const {
  if (family_ != Family::table) return 1;
  std::size_t first = table_.size();
  std::size_t g = 0;
  for (std::size_t k = 0; k < table_.size(); ++k) {
    if (table_[k] <= 0.0) continue;
    if (first == table_.size()) {
      first = k;
    } else {
      g = std::gcd(g, k - first);
    }
  }
  return g == 0 ? 1 : g;
}

std::vector<double> WeightSequence::truncated(double tail_tol) const {
  if (family_ == Family::table) {
    std::vector<double> out(table_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = coefficient(k);
    return out;
  }
  if (!(radius() > 1.0)) throw NumericalError("moment diverges: weights are not summable");
  const double total = gf_derivative(0, 1.0);
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    out.push_back(coefficient(k));
    const double next = coefficient(k + 1);
    const double cur = out.back();
    if (k >= 2 && cur > 0.0 && next < cur) {
      const double rho = next / cur;
      if (next / (1.0 - rho) < tail_tol * total) break;
    }
    if (k > 100000) throw NumericalError("weight tail does not decay");
  }
  return out;
}

OffspringDistribution::OffspringDistribution(WeightSequence weights)
    : weights_(std::move(weights)) {
  if (weights_.kind() != WeightKind::rooted_phi) {
    throw std::invalid_argument("offspring distributions are rooted weight sequences");
  }
  probs_ = weights_.truncated(1e-20);
  const double total = weights_.family() == Family::table
                           ? std::accumulate(probs_.begin(), probs_.end(), 0.0)
                           : weights_.gf_derivative(0, 1.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("offspring probabilities must sum to 1 (got " +
                                std::to_string(total) + ")");
  }
  const auto mv = mean_variance(weights_);
  mean_ = mv.mean;
  variance_ = mv.variance;
  span_ = weights_.span();
}

double OffspringDistribution::sigma() const { return std::sqrt(variance_); }

double OffspringDistribution::fourth_moment() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    const double kd = static_cast<double>(k);
    m += kd * kd * kd * kd * probs_[k];
  }
  return m;
}

MeanVariance mean_variance(const WeightSequence& ws) {
  if (ws.family() != Family::table && !(ws.radius() > 1.0)) {
    throw NumericalError("moment diverges");
  }
  const double s0 = ws.gf_derivative(0, 1.0);
  const double s1 = ws.gf_derivative(1, 1.0);
  const double s2 = ws.gf_derivative(2, 1.0);
  if (!(s0 > 0.0)) throw std::invalid_argument("weights are identically zero");
  const double mean = s1 / s0;
  return {mean, (s2 + s1) / s0 - mean * mean};
}

MeanVariance mean_variance(const OffspringDistribution& p) {
  return {p.mean(), p.variance()};
}

WeightSequence tilt(const WeightSequence& ws, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("tilt parameters must be positive and finite");
  }
  return WeightSequence(ws.kind(), ws.family(), ws.scale() * a, ws.ratio() * b, ws.table());
}

CriticalTilt criticalize(const WeightSequence& ws) {
  if (ws.kind() != WeightKind::rooted_phi) {
    throw std::invalid_argument("criticalize expects rooted weights");
  }
  if (ws.radius() == 0.0) throw NumericalError("radius zero");

  // Work in t = b * ratio with the family's unscaled base sequence.
  const WeightSequence base(ws.kind(), ws.family(), 1.0, 1.0, ws.table());
  const auto mean_at = [&](double t) {
    return t * base.gf_derivative(1, t) / base.gf_derivative(0, t);
  };

  const double limit = base.radius();
  double hi;
  if (std::isinf(limit)) {
    hi = 1.0;
    while (mean_at(hi) < 1.0) {
      hi *= 2.0;
      if (hi > 1e12) throw NumericalError("no critical tilt in radius of convergence");
    }
  } else {
    hi = limit * (1.0 - 1e-15);
    if (mean_at(hi) < 1.0) throw NumericalError("no critical tilt in radius of convergence");
  }
  double lo = 0.0;
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    t = 0.5 * (lo + hi);
    const double m = mean_at(t);
    if (std::abs(m - 1.0) <= 1e-13) break;
    (m < 1.0 ? lo : hi) = t;
  }
  const double b = t / ws.ratio();
  const double a = 1.0 / (ws.scale() * base.gf_derivative(0, t));
  OffspringDistribution p(tilt(ws, a, b));
  if (std::abs(p.mean() - 1.0) > 1e-10) {
    throw NumericalError("criticalization did not converge (mean " + std::to_string(p.mean()) + ")");
  }
  return {std::move(p), a, b};
}

RootedPair unrooted_to_rooted(const WeightSequence& w) {
  if (w.kind() != WeightKind::unrooted_w) {
    throw std::invalid_argument("unrooted_to_rooted expects unrooted weights");
  }
  const double s = w.scale();
  const double r = w.ratio();
  const auto rooted = WeightKind::rooted_phi;
  switch (w.family()) {
    case Family::table: {
      std::vector<double> phi, phi0;
      const std::size_t top = w.max_index();
      double fact = 1.0;
      for (std::size_t k = 0; k <= top; ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        phi0.push_back(w.coefficient(k) / fact);
        phi.push_back(k + 1 <= top ? w.coefficient(k + 1) / fact : 0.0);
      }
      if (phi.size() > 1 && phi.back() == 0.0) phi.pop_back();
      return {WeightSequence::from_table(phi), WeightSequence::from_table(phi0)};
    }
    case Family::geometric:
      return {WeightSequence(rooted, Family::poisson, s * r, r),
              WeightSequence(rooted, Family::poisson, s, r)};
    case Family::factorial:
      return {WeightSequence(rooted, Family::linear, s * r, r),
              WeightSequence(rooted, Family::geometric, s, r)};
    case Family::shifted_factorial:
      return {WeightSequence(rooted, Family::geometric, s * r, r),
              WeightSequence(rooted, Family::logarithmic, s, r)};
    default: break;
  }
  throw std::invalid_argument(std::string("unsupported unrooted family '") +
                              family_name(w.family()) + "'");
}

std::vector<double> root_degree_limit(const OffspringDistribution& p0) {
  const double mu = p0.mean();
  if (!(mu > 0.0)) throw NumericalError("root law has zero mean");
  const auto probs = p0.probabilities();
  std::vector<double> out(probs.size(), 0.0);
  for (std::size_t k = 1; k < probs.size(); ++k) out[k] = static_cast<double>(k) * probs[k] / mu;
  return out;
}

UnrootedLaws critical_unrooted_laws(const WeightSequence& w) {
  auto pair = unrooted_to_rooted(w);
  auto crit = criticalize(pair.phi);
  const double b = crit.b;
  if (!(b < pair.phi_root.radius())) {
    throw NumericalError("root weights are not summable at the critical tilt");
  }
  const double a0 = 1.0 / pair.phi_root.gf_derivative(0, b);
  OffspringDistribution p_root(tilt(pair.phi_root, a0, b));
  return {std::move(crit.distribution), std::move(p_root)};
}

}  // namespace treeprofile
