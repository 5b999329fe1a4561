#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace aklab {

double mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);
double median(std::vector<double> x);  // by value: partially sorts a copy

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Streaming accumulator for mean / variance (Welford).
class RunningStat {
public:
    void add(double x);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  // sample variance
    double std_error() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion at z standard deviations.
WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z = 3.0);

/// Ordinary least squares fitted from streamed rows, with
/// heteroscedasticity-robust (HC1) standard errors. Two passes over the data:
/// feed rows, solve(), then feed the same rows again for the residual moments.
class OlsAccumulator {
public:
    explicit OlsAccumulator(std::size_t k);

    void add(const double* x, double y);
    void solve();  // throws on a singular design matrix
    bool solved() const { return solved_; }

    void add_residual_pass(const double* x, double y);
    void finalize_robust();

    std::size_t dim() const { return k_; }
    std::size_t rows() const { return n_; }
    const std::vector<double>& coefficients() const { return beta_; }
    const std::vector<double>& std_errors() const { return se_; }

private:
    std::size_t k_;
    std::size_t n_ = 0;
    std::vector<double> xtx_;   // k x k, row-major
    std::vector<double> xty_;   // k
    std::vector<double> meat_;  // sum x x^T e^2
    std::vector<double> beta_;
    std::vector<double> se_;
    bool solved_ = false;
};

}  // namespace aklab
