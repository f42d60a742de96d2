#pragma once

// Law of the i.i.d. signal processes Y^i_t.
//
// Before the horizon T the law is time-constant and given by one of the
// SignalLaw alternatives; at and after T every signal jumps to post_value.
// An additive shift is applied to all signal values. Signal paths are coupled
// comonotonically across time: Y^i_t = quantile(t, U^i) for one uniform per
// agent, which makes paths nondecreasing whenever post_value lies above the
// pre-horizon support.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mfstop/errors.hpp"

namespace mfstop {

using Count = std::int64_t;

struct GameParams {
  double r = 1.0;
  double c = 1.0;
  std::optional<Count> n;

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("interaction constant c must be > 0");
    if (!std::isfinite(r)) throw ConfigError("threshold r must be finite");
    if (n && *n < 1) throw ConfigError("player count n must be >= 1");
  }

  Count players() const {
    if (!n) throw ConfigError("player count n is required here");
    return *n;
  }
};

namespace detail {

// Continuous piecewise-linear c.d.f. through knots (y_j, F_j), F_0 = 0 and
// F_last = 1. Shared by the piecewise-density and custom-c.d.f. laws.
class LinearCdfTable {
 public:
  LinearCdfTable() = default;
  LinearCdfTable(std::vector<double> ys, std::vector<double> fs) : y_(std::move(ys)), f_(std::move(fs)) {
    if (y_.size() < 2 || y_.size() != f_.size()) throw ConfigError("piecewise c.d.f. needs >= 2 knots");
    for (std::size_t j = 0; j + 1 < y_.size(); ++j) {
      if (!(y_[j] < y_[j + 1])) throw ConfigError("piecewise c.d.f. knots must be strictly increasing");
      if (f_[j + 1] < f_[j]) throw ConfigError("piecewise c.d.f. values must be nondecreasing");
    }
    if (f_.front() != 0.0) throw ConfigError("piecewise c.d.f. must start at 0");
    if (std::abs(f_.back() - 1.0) > 1e-12) throw ConfigError("piecewise c.d.f. must end at 1");
    f_.back() = 1.0;
  }

  double cdf(double y) const {
    if (y <= y_.front()) return 0.0;
    if (y >= y_.back()) return 1.0;
    const auto j = segment_of(y);
    const double slope = (f_[j + 1] - f_[j]) / (y_[j + 1] - y_[j]);
    return std::clamp(f_[j] + slope * (y - y_[j]), f_[j], f_[j + 1]);
  }

  // Right-continuous density: slope of the segment [y_j, y_{j+1}) containing y.
  double density_right(double y) const {
    if (y < y_.front() || y >= y_.back()) return 0.0;
    const auto j = segment_of(y);
    return (f_[j + 1] - f_[j]) / (y_[j + 1] - y_[j]);
  }

  double density_left(double y) const {
    if (y <= y_.front() || y > y_.back()) return 0.0;
    auto it = std::lower_bound(y_.begin(), y_.end(), y);
    const auto j = static_cast<std::size_t>(it - y_.begin()) - 1;
    return (f_[j + 1] - f_[j]) / (y_[j + 1] - y_[j]);
  }

  double quantile(double p) const {
    if (p <= 0.0) return support_min();
    if (p >= 1.0) p = 1.0;
    for (std::size_t j = 0; j + 1 < y_.size(); ++j) {
      if (f_[j + 1] > f_[j] && f_[j + 1] >= p) {
        const double frac = (p - f_[j]) / (f_[j + 1] - f_[j]);
        return std::clamp(y_[j] + frac * (y_[j + 1] - y_[j]), y_[j], y_[j + 1]);
      }
    }
    return support_max();
  }

  double support_min() const {
    for (std::size_t j = 0; j + 1 < y_.size(); ++j)
      if (f_[j + 1] > f_[j]) return y_[j];
    return y_.front();
  }

  double support_max() const {
    for (std::size_t j = y_.size() - 1; j > 0; --j)
      if (f_[j] > f_[j - 1]) return y_[j];
    return y_.back();
  }

  const std::vector<double>& knots() const { return y_; }
  const std::vector<double>& values() const { return f_; }

 private:
  std::size_t segment_of(double y) const {
    auto it = std::upper_bound(y_.begin(), y_.end(), y);
    return static_cast<std::size_t>(it - y_.begin()) - 1;
  }

  std::vector<double> y_;
  std::vector<double> f_;
};

}  // namespace detail

// Finitely many atoms; "two_atom" in configuration files, though any number
// of atoms is accepted.
class AtomicLaw {
 public:
  AtomicLaw(std::vector<double> locations, std::vector<double> weights)
      : loc_(std::move(locations)), w_(std::move(weights)) {
    if (loc_.empty() || loc_.size() != w_.size()) throw ConfigError("atomic law needs matching locations and weights");
    double total = 0.0;
    for (std::size_t j = 0; j < loc_.size(); ++j) {
      if (j > 0 && !(loc_[j - 1] < loc_[j])) throw ConfigError("atom locations must be strictly increasing");
      if (w_[j] < 0.0) throw ConfigError("atom weights must be nonnegative");
      total += w_[j];
      cum_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("atom weights must sum to 1");
    cum_.back() = 1.0;
  }

  double cdf(double y) const {
    auto it = std::upper_bound(loc_.begin(), loc_.end(), y);
    return it == loc_.begin() ? 0.0 : cum_[static_cast<std::size_t>(it - loc_.begin()) - 1];
  }
  double cdf_left(double y) const {
    auto it = std::lower_bound(loc_.begin(), loc_.end(), y);
    return it == loc_.begin() ? 0.0 : cum_[static_cast<std::size_t>(it - loc_.begin()) - 1];
  }
  double quantile(double p) const {
    auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
    if (it == cum_.end()) return loc_.back();
    return loc_[static_cast<std::size_t>(it - cum_.begin())];
  }
  double support_min() const { return loc_.front(); }
  double support_max() const { return loc_.back(); }
  std::vector<double> breakpoints() const { return loc_; }

  const std::vector<double>& locations() const { return loc_; }
  const std::vector<double>& weights() const { return w_; }

 private:
  std::vector<double> loc_;
  std::vector<double> w_;
  std::vector<double> cum_;
};

// Piecewise-constant density: levels[j] on [breakpoints[j], breakpoints[j+1]).
class PiecewiseDensity {
 public:
  PiecewiseDensity(std::vector<double> breakpoints, std::vector<double> levels)
      : bp_(std::move(breakpoints)), levels_(std::move(levels)) {
    if (bp_.size() < 2 || levels_.size() + 1 != bp_.size())
      throw ConfigError("piecewise density needs k+1 breakpoints for k levels");
    std::vector<double> fs{0.0};
    double mass = 0.0;
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      if (levels_[j] < 0.0) throw ConfigError("density levels must be nonnegative");
      if (!(bp_[j] < bp_[j + 1])) throw ConfigError("density breakpoints must be strictly increasing");
      mass += levels_[j] * (bp_[j + 1] - bp_[j]);
      fs.push_back(mass);
    }
    if (std::abs(mass - 1.0) > 1e-12) throw ConfigError("density must integrate to 1");
    table_ = detail::LinearCdfTable(bp_, std::move(fs));
  }

  double cdf(double y) const { return table_.cdf(y); }
  double cdf_left(double y) const { return table_.cdf(y); }
  double density_right(double y) const {
    if (y < bp_.front() || y >= bp_.back()) return 0.0;
    auto it = std::upper_bound(bp_.begin(), bp_.end(), y);
    return levels_[static_cast<std::size_t>(it - bp_.begin()) - 1];
  }
  double density_left(double y) const {
    if (y <= bp_.front() || y > bp_.back()) return 0.0;
    auto it = std::lower_bound(bp_.begin(), bp_.end(), y);
    return levels_[static_cast<std::size_t>(it - bp_.begin()) - 1];
  }
  double quantile(double p) const { return table_.quantile(p); }
  double support_min() const { return table_.support_min(); }
  double support_max() const { return table_.support_max(); }
  std::vector<double> breakpoints() const { return bp_; }

  const std::vector<double>& levels() const { return levels_; }

 private:
  std::vector<double> bp_;
  std::vector<double> levels_;
  detail::LinearCdfTable table_;
};

// Tent density f(x) = 2 - 4|x - 1/2| on [0, 1].
struct TentLaw {
  double cdf(double y) const {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    if (y <= 0.5) return 2.0 * y * y;
    const double z = 1.0 - y;
    return 1.0 - 2.0 * z * z;
  }
  double cdf_left(double y) const { return cdf(y); }
  double density_right(double y) const {
    if (y < 0.0 || y >= 1.0) return 0.0;
    return 2.0 - 4.0 * std::abs(y - 0.5);
  }
  double density_left(double y) const {
    if (y <= 0.0 || y > 1.0) return 0.0;
    return 2.0 - 4.0 * std::abs(y - 0.5);
  }
  double quantile(double p) const {
    p = std::clamp(p, 0.0, 1.0);
    if (p <= 0.5) return std::sqrt(p / 2.0);
    return 1.0 - std::sqrt((1.0 - p) / 2.0);
  }
  double support_min() const { return 0.0; }
  double support_max() const { return 1.0; }
  std::vector<double> breakpoints() const { return {0.0, 0.5, 1.0}; }
};

class UniformInterval {
 public:
  UniformInterval(double a, double b) : a_(a), b_(b) {
    if (!(a < b)) throw ConfigError("uniform interval needs a < b");
  }
  double cdf(double y) const {
    if (y <= a_) return 0.0;
    if (y >= b_) return 1.0;
    return (y - a_) / (b_ - a_);
  }
  double cdf_left(double y) const { return cdf(y); }
  double density_right(double y) const { return (y >= a_ && y < b_) ? 1.0 / (b_ - a_) : 0.0; }
  double density_left(double y) const { return (y > a_ && y <= b_) ? 1.0 / (b_ - a_) : 0.0; }
  double quantile(double p) const { return a_ + std::clamp(p, 0.0, 1.0) * (b_ - a_); }
  double support_min() const { return a_; }
  double support_max() const { return b_; }
  std::vector<double> breakpoints() const { return {a_, b_}; }
  double a() const { return a_; }
  double b() const { return b_; }

 private:
  double a_;
  double b_;
};

class PiecewiseLinearCdf {
 public:
  PiecewiseLinearCdf(std::vector<double> ys, std::vector<double> fs) : table_(std::move(ys), std::move(fs)) {}
  double cdf(double y) const { return table_.cdf(y); }
  double cdf_left(double y) const { return table_.cdf(y); }
  double density_right(double y) const { return table_.density_right(y); }
  double density_left(double y) const { return table_.density_left(y); }
  double quantile(double p) const { return table_.quantile(p); }
  double support_min() const { return table_.support_min(); }
  double support_max() const { return table_.support_max(); }
  std::vector<double> breakpoints() const { return table_.knots(); }
  const std::vector<double>& knots_y() const { return table_.knots(); }
  const std::vector<double>& knots_F() const { return table_.values(); }

 private:
  detail::LinearCdfTable table_;
};

using SignalLaw = std::variant<AtomicLaw, PiecewiseDensity, TentLaw, UniformInterval, PiecewiseLinearCdf>;

inline std::string law_kind(const SignalLaw& law) {
  struct Namer {
    std::string operator()(const AtomicLaw&) const { return "two_atom"; }
    std::string operator()(const PiecewiseDensity&) const { return "piecewise_density"; }
    std::string operator()(const TentLaw&) const { return "tent"; }
    std::string operator()(const UniformInterval&) const { return "uniform_interval"; }
    std::string operator()(const PiecewiseLinearCdf&) const { return "custom_cdf"; }
  };
  return std::visit(Namer{}, law);
}

class SignalModel {
 public:
  SignalModel(SignalLaw law, std::optional<double> horizon, double post_value, double shift = 0.0)
      : law_(std::move(law)), horizon_(horizon), post_value_(post_value), shift_(shift) {
    if (horizon_ && !(*horizon_ >= 0.0)) throw ConfigError("horizon must be >= 0");
    if (!(shift_ >= 0.0) || !std::isfinite(shift_)) throw ConfigError("shift must be a finite value >= 0");
    if (horizon_ && !(post_value_ >= base_support_max()))
      throw ConfigError("post_value must not lie below the support (signal paths must increase)");
  }

  // post_value = r + 1 + right endpoint of the support, so every agent stops at T.
  static SignalModel with_default_post(SignalLaw law, std::optional<double> horizon, double r, double shift = 0.0) {
    const double right = std::visit([](const auto& l) { return l.support_max(); }, law);
    return SignalModel(std::move(law), horizon, r + 1.0 + right, shift);
  }

  SignalModel shifted(double eps) const { return SignalModel(law_, horizon_, post_value_, eps); }

  bool after_horizon(double t) const { return horizon_ && t >= *horizon_; }

  double cdf(double t, double y) const {
    if (after_horizon(t)) return y >= post_value_ + shift_ ? 1.0 : 0.0;
    const double z = y - shift_;
    return std::visit([z](const auto& l) { return l.cdf(z); }, law_);
  }

  // Left limit F_t(y-), i.e. P(Y_t < y).
  double cdf_left(double t, double y) const {
    if (after_horizon(t)) return y > post_value_ + shift_ ? 1.0 : 0.0;
    const double z = y - shift_;
    return std::visit([z](const auto& l) { return l.cdf_left(z); }, law_);
  }

  bool has_density(double t) const { return !after_horizon(t) && !std::holds_alternative<AtomicLaw>(law_); }

  // Right-continuous density value, or nullopt for atomic laws.
  std::optional<double> density(double t, double y) const {
    if (!has_density(t)) return std::nullopt;
    const double z = y - shift_;
    return std::visit(
        [z](const auto& l) -> std::optional<double> {
          if constexpr (std::is_same_v<std::decay_t<decltype(l)>, AtomicLaw>) {
            return std::nullopt;
          } else {
            return l.density_right(z);
          }
        },
        law_);
  }

  // (left limit, right limit) of the density at y.
  std::optional<std::pair<double, double>> density_limits(double t, double y) const {
    if (!has_density(t)) return std::nullopt;
    const double z = y - shift_;
    return std::visit(
        [z](const auto& l) -> std::optional<std::pair<double, double>> {
          if constexpr (std::is_same_v<std::decay_t<decltype(l)>, AtomicLaw>) {
            return std::nullopt;
          } else {
            return std::pair{l.density_left(z), l.density_right(z)};
          }
        },
        law_);
  }

  double quantile(double t, double p) const {
    if (after_horizon(t)) return post_value_ + shift_;
    p = std::clamp(p, 0.0, 1.0);
    return shift_ + std::visit([p](const auto& l) { return l.quantile(p); }, law_);
  }

  // Signal values where the c.d.f. formula changes.
  std::vector<double> breakpoints(double t) const {
    if (after_horizon(t)) return {post_value_ + shift_};
    auto bps = std::visit([](const auto& l) { return l.breakpoints(); }, law_);
    for (double& b : bps) b += shift_;
    return bps;
  }

  double support_min(double t) const {
    if (after_horizon(t)) return post_value_ + shift_;
    return shift_ + std::visit([](const auto& l) { return l.support_min(); }, law_);
  }
  double support_max(double t) const {
    if (after_horizon(t)) return post_value_ + shift_;
    return shift_ + base_support_max();
  }

  const SignalLaw& law() const { return law_; }
  std::string kind() const { return law_kind(law_); }
  std::optional<double> horizon() const { return horizon_; }
  double post_value() const { return post_value_; }
  double shift() const { return shift_; }

 private:
  double base_support_max() const {
    return std::visit([](const auto& l) { return l.support_max(); }, law_);
  }

  SignalLaw law_;
  std::optional<double> horizon_;
  double post_value_;
  double shift_;
};

inline double cdf_at(const SignalModel& model, double t, double y) { return model.cdf(t, y); }

inline std::optional<double> density_at(const SignalModel& model, double t, double y) {
  return model.density(t, y);
}

inline double quantile_at(const SignalModel& model, double t, double p) { return model.quantile(t, p); }

// Element-wise inverse-transform sampling; order of the input is preserved.
inline std::vector<double> sample_signals(const SignalModel& model, double t, std::span<const double> uniforms) {
  std::vector<double> out;
  out.reserve(uniforms.size());
  for (double u : uniforms) out.push_back(model.quantile(t, u));
  return out;
}

}  // namespace mfstop
