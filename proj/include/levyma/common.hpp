#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyma {

// Compensated (Kahan) accumulator. Power-variation sums mix terms spanning
// many orders of magnitude; naive summation loses the small ones.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// |x|^p with an explicit zero guard so p < 1 never sees pow(0, p) edge cases.
inline double pow_abs(double x, double p) {
    if (x == 0.0) return 0.0;
    return std::pow(std::fabs(x), p);
}

// Binomial coefficient as double; k-th order differences only need small k.
inline double binom(int n, int j) {
    double r = 1.0;
    for (int i = 1; i <= j; ++i) r *= double(n - (j - i)) / double(i);
    return r;
}

// Falling factorial alpha (alpha-1) ... (alpha-m+1); empty product for m = 0.
inline double falling_factorial(double alpha, int m) {
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= (alpha - i);
    return r;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace levyma
