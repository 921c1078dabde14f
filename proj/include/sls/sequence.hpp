#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sls {

/// Norm selector shared by vector norms and sequence norms.
enum class Norm { one, two, inf };

inline const char* to_string(Norm n) {
    switch (n) {
        case Norm::one: return "1";
        case Norm::two: return "2";
        case Norm::inf: return "inf";
    }
    return "?";
}

inline double vec_norm(const Eigen::VectorXd& v, Norm n = Norm::two) {
    switch (n) {
        case Norm::one: return v.lpNorm<1>();
        case Norm::two: return v.norm();
        case Norm::inf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
    }
    return 0.0;
}

// Finite-horizon vector-valued signal: values x_0 .. x_H in R^dim.
class Sequence {
  public:
    Sequence() = default;

    Sequence(int dim, int horizon) : dim_(dim) {
        if (dim <= 0) throw std::invalid_argument("Sequence: dim must be positive");
        if (horizon < 0) throw std::invalid_argument("Sequence: horizon must be >= 0");
        values_.assign(static_cast<size_t>(horizon) + 1, Eigen::VectorXd::Zero(dim));
    }

    explicit Sequence(std::vector<Eigen::VectorXd> values) : values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("Sequence: needs at least one value");
        dim_ = static_cast<int>(values_.front().size());
        for (const auto& v : values_)
            if (v.size() != dim_)
                throw std::invalid_argument("Sequence: inconsistent value dimensions");
    }

    /// Scalar sequence from a list of samples.
    static Sequence scalar(std::initializer_list<double> samples) {
        std::vector<Eigen::VectorXd> vals;
        vals.reserve(samples.size());
        for (double s : samples) {
            Eigen::VectorXd v(1);
            v << s;
            vals.push_back(std::move(v));
        }
        return Sequence(std::move(vals));
    }

    static Sequence zeros(int dim, int horizon) { return Sequence(dim, horizon); }

    /// Unit impulse: magnitude on one coordinate at time `at`, zero elsewhere.
    static Sequence impulse(int dim, int horizon, int coord = 0, double magnitude = 1.0, int at = 0) {
        Sequence s(dim, horizon);
        if (coord < 0 || coord >= dim) throw std::invalid_argument("Sequence::impulse: bad coord");
        if (at < 0 || at > horizon) throw std::invalid_argument("Sequence::impulse: bad time index");
        s[at](coord) = magnitude;
        return s;
    }

    static Sequence constant(const Eigen::VectorXd& value, int horizon) {
        Sequence s(static_cast<int>(value.size()), horizon);
        for (auto& v : s.values_) v = value;
        return s;
    }

    int dim() const { return dim_; }
    int horizon() const { return static_cast<int>(values_.size()) - 1; }
    int length() const { return static_cast<int>(values_.size()); }

    Eigen::VectorXd& operator[](int t) { return values_.at(static_cast<size_t>(t)); }
    const Eigen::VectorXd& operator[](int t) const { return values_.at(static_cast<size_t>(t)); }

    const std::vector<Eigen::VectorXd>& values() const { return values_; }

    Sequence& operator+=(const Sequence& o) {
        check_same_shape(o, "+");
        for (size_t t = 0; t < values_.size(); ++t) values_[t] += o.values_[t];
        return *this;
    }
    Sequence& operator-=(const Sequence& o) {
        check_same_shape(o, "-");
        for (size_t t = 0; t < values_.size(); ++t) values_[t] -= o.values_[t];
        return *this;
    }
    Sequence& operator*=(double a) {
        for (auto& v : values_) v *= a;
        return *this;
    }

    friend Sequence operator+(Sequence a, const Sequence& b) { return a += b; }
    friend Sequence operator-(Sequence a, const Sequence& b) { return a -= b; }
    friend Sequence operator*(double a, Sequence s) { return s *= a; }

  private:
    void check_same_shape(const Sequence& o, const char* op) const {
        if (o.dim_ != dim_ || o.values_.size() != values_.size())
            throw std::invalid_argument(std::string("Sequence: shape mismatch in operator") + op);
    }

    int dim_ = 0;
    std::vector<Eigen::VectorXd> values_;
};

/// P^tau: keep samples 0..tau, zero the rest. tau >= horizon returns a copy.
inline Sequence truncate(const Sequence& s, int tau) {
    if (tau < 0) throw std::invalid_argument("truncate: tau must be >= 0");
    Sequence out = s;
    for (int t = tau + 1; t <= s.horizon(); ++t) out[t].setZero();
    return out;
}

/// Sequence lp norm over per-step vector norms.
inline double lp_norm(const Sequence& s, Norm p = Norm::two, Norm vec = Norm::two) {
    switch (p) {
        case Norm::one: {
            double acc = 0.0;
            for (int t = 0; t <= s.horizon(); ++t) acc += vec_norm(s[t], vec);
            return acc;
        }
        case Norm::two: {
            double acc = 0.0;
            for (int t = 0; t <= s.horizon(); ++t) {
                double v = vec_norm(s[t], vec);
                acc += v * v;
            }
            return std::sqrt(acc);
        }
        case Norm::inf: {
            double acc = 0.0;
            for (int t = 0; t <= s.horizon(); ++t) acc = std::max(acc, vec_norm(s[t], vec));
            return acc;
        }
    }
    return 0.0;
}

inline double max_abs_diff(const Sequence& a, const Sequence& b) {
    if (a.dim() != b.dim() || a.horizon() != b.horizon())
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (int t = 0; t <= a.horizon(); ++t)
        m = std::max(m, (a[t] - b[t]).lpNorm<Eigen::Infinity>());
    return m;
}

}  // namespace sls
