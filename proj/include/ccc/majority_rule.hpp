#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccc/errors.hpp"

namespace ccc {

// Majority rules: odd, non-decreasing maps [-1,1] -> [-1,1].  Oddness and
// monotonicity are guaranteed structurally for the built-in kinds; custom
// tables are validated on construction.

class MajorityRule {
  public:
    enum class Kind { pure_majority, identity, linear, tanh_slope, tilde, custom };

    /// sign(z), with 0 at the origin.
    static MajorityRule pure_majority() { return MajorityRule(Kind::pure_majority); }

    static MajorityRule identity() { return MajorityRule(Kind::identity); }

    /// lambda*z on [-delta,delta], constant lambda*delta beyond (clamped to [-1,1]).
    static MajorityRule linear(double lambda, double delta) {
        if (!(lambda > 0.0)) throw ConfigError("linear rule needs lambda > 0");
        if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("linear rule needs delta in (0,1]");
        MajorityRule r(Kind::linear);
        r.lambda_ = lambda;
        r.delta_ = delta;
        return r;
    }

    static MajorityRule tanh_rule(double slope) {
        if (!(slope >= 0.0)) throw ConfigError("tanh rule needs slope >= 0");
        MajorityRule r(Kind::tanh_slope);
        r.lambda_ = slope;
        return r;
    }

    /// The 1-Lipschitz companion of `base`: keep base on [-delta,delta],
    /// extend with slope lambda outside, divide by lambda, clamp to [-1,1].
    /// Requires 0 <= base(z2)-base(z1) <= lambda (z2-z1) on [-delta,delta].
    static MajorityRule tilde(const MajorityRule& base, double lambda, double delta) {
        if (!(lambda > 0.0)) throw ConfigError("tilde rule needs lambda > 0");
        if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("tilde rule needs delta in (0,1]");
        double excess = base.lipschitz_excess(lambda, -delta, delta, 1024);
        if (excess > 1e-12) {
            std::ostringstream os;
            os << "tilde base rule is not " << lambda << "-Lipschitz on [-" << delta << "," << delta
               << "] (max excess " << excess << ")";
            throw ConfigError(os.str());
        }
        MajorityRule r(Kind::tilde);
        r.lambda_ = lambda;
        r.delta_ = delta;
        r.base_ = std::make_shared<MajorityRule>(base);
        return r;
    }

    /// Sample points (z_i, v_i) on [0,1], extended to [-1,0) by odd
    /// reflection, interpolated piecewise linearly.  Tables must be monotone.
    static MajorityRule custom(std::vector<std::pair<double, double>> right_half) {
        if (right_half.empty()) throw ConfigError("custom rule table is empty");
        std::sort(right_half.begin(), right_half.end());
        if (right_half.front().first != 0.0) right_half.insert(right_half.begin(), {0.0, 0.0});
        if (right_half.front().second != 0.0)
            throw ConfigError("custom rule must map 0 to 0 (oddness)");
        if (right_half.back().first > 1.0) throw ConfigError("custom rule abscissae must lie in [0,1]");
        for (std::size_t i = 1; i < right_half.size(); ++i) {
            if (right_half[i].first == right_half[i - 1].first)
                throw ConfigError("custom rule has duplicate abscissae");
            if (right_half[i].second < right_half[i - 1].second)
                throw ConfigError("custom rule table is not non-decreasing");
        }
        if (right_half.back().second > 1.0) throw ConfigError("custom rule values must lie in [-1,1]");
        if (right_half.back().first < 1.0) right_half.emplace_back(1.0, right_half.back().second);
        MajorityRule r(Kind::custom);
        r.table_ = std::move(right_half);
        return r;
    }

    Kind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double delta() const { return delta_; }

    /// phi(z); rejects arguments outside [-1,1].
    double operator()(double z) const {
        if (!(z >= -1.0 && z <= 1.0)) throw std::domain_error("majority rule argument outside [-1,1]");
        return eval(z);
    }

    /// Largest observed violation of |phi(z2)-phi(z1)| <= lambda (z2-z1) over a
    /// grid of [lo,hi]; <= 0 means no violation observed.
    double lipschitz_excess(double lambda, double lo, double hi, int grid_points) const {
        double worst = -1.0;
        double prev_z = lo, prev_v = eval(lo);
        for (int i = 1; i < grid_points; ++i) {
            double z = lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);
            double v = eval(z);
            worst = std::max(worst, std::fabs(v - prev_v) - lambda * (z - prev_z));
            prev_z = z;
            prev_v = v;
        }
        return worst;
    }

    bool is_one_lipschitz(int grid_points = 2001) const {
        return lipschitz_excess(1.0, -1.0, 1.0, grid_points) <= 1e-12;
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind_) {
            case Kind::pure_majority: os << "pure"; break;
            case Kind::identity: os << "identity"; break;
            case Kind::linear: os << "linear(lambda=" << lambda_ << ",delta=" << delta_ << ")"; break;
            case Kind::tanh_slope: os << "tanh(" << lambda_ << ")"; break;
            case Kind::tilde:
                os << "tilde(" << base_->describe() << ",lambda=" << lambda_ << ",delta=" << delta_ << ")";
                break;
            case Kind::custom: os << "custom(" << table_.size() << " points)"; break;
        }
        return os.str();
    }

  private:
    explicit MajorityRule(Kind kind) : kind_(kind) {}

    static double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

    double eval(double z) const {
        switch (kind_) {
            case Kind::pure_majority:
                return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
            case Kind::identity:
                return z;
            case Kind::linear: {
                double core = std::clamp(z, -delta_, delta_);
                return clamp1(lambda_ * core);
            }
            case Kind::tanh_slope:
                return std::tanh(lambda_ * z);
            case Kind::tilde: {
                double phi;
                if (z > delta_)
                    phi = lambda_ * (z - delta_) + base_->eval(delta_);
                else if (z < -delta_)
                    phi = lambda_ * (z + delta_) + base_->eval(-delta_);
                else
                    phi = base_->eval(z);
                return clamp1(phi / lambda_);
            }
            case Kind::custom: {
                double a = std::fabs(z);
                auto it = std::lower_bound(table_.begin(), table_.end(), a,
                                           [](const std::pair<double, double>& p, double x) {
                                               return p.first < x;
                                           });
                double v;
                if (it == table_.begin())
                    v = it->second;
                else if (it == table_.end())
                    v = table_.back().second;
                else {
                    auto prev = it - 1;
                    double w = (a - prev->first) / (it->first - prev->first);
                    v = prev->second + w * (it->second - prev->second);
                }
                return z < 0.0 ? -v : v;
            }
        }
        return 0.0;
    }

    Kind kind_;
    double lambda_ = 0.0;
    double delta_ = 0.0;
    std::shared_ptr<const MajorityRule> base_;
    std::vector<std::pair<double, double>> table_;
};

/// Evaluates the rule with the [-1,1] domain check.
inline double phi_eval(const MajorityRule& rule, double z) { return rule(z); }

}  // namespace ccc
