#include "aklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace aklab {

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median: empty sample");
    const std::size_t mid = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + mid, x.end());
    double hi = x[mid];
    if (x.size() % 2 == 1) return hi;
    std::nth_element(x.begin(), x.begin() + mid - 1, x.end());
    return 0.5 * (hi + x[mid - 1]);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ls_slope: need matching samples of size >= 2");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ls_slope: degenerate abscissae");
    return sxy / sxx;
}

void RunningStat::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

double RunningStat::variance() const {
    return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningStat::std_error() const {
    return n_ < 1 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z) {
    if (n == 0) return {};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

OlsAccumulator::OlsAccumulator(std::size_t k)
    : k_(k), xtx_(k * k, 0.0), xty_(k, 0.0), meat_(k * k, 0.0) {
    if (k == 0) throw std::invalid_argument("OlsAccumulator: zero predictors");
}

void OlsAccumulator::add(const double* x, double y) {
    for (std::size_t i = 0; i < k_; ++i) {
        xty_[i] += x[i] * y;
        for (std::size_t j = 0; j < k_; ++j) xtx_[i * k_ + j] += x[i] * x[j];
    }
    ++n_;
}

void OlsAccumulator::solve() {
    if (n_ <= k_) throw std::invalid_argument("OlsAccumulator: too few rows");
    Eigen::MatrixXd A(k_, k_);
    Eigen::VectorXd b(k_);
    for (std::size_t i = 0; i < k_; ++i) {
        b(static_cast<Eigen::Index>(i)) = xty_[i];
        for (std::size_t j = 0; j < k_; ++j)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                xtx_[i * k_ + j];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
        throw std::invalid_argument("conditional-mean regression: singular design matrix");
    Eigen::VectorXd beta = lu.solve(b);
    beta_.assign(beta.data(), beta.data() + k_);
    solved_ = true;
}

void OlsAccumulator::add_residual_pass(const double* x, double y) {
    double e = y;
    for (std::size_t i = 0; i < k_; ++i) e -= beta_[i] * x[i];
    const double e2 = e * e;
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < k_; ++j) meat_[i * k_ + j] += x[i] * x[j] * e2;
}

void OlsAccumulator::finalize_robust() {
    Eigen::MatrixXd A(k_, k_), M(k_, k_);
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < k_; ++j) {
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                xtx_[i * k_ + j];
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                meat_[i * k_ + j];
        }
    const Eigen::MatrixXd Ainv = A.fullPivLu().inverse();
    // HC1 small-sample factor n / (n - k).
    const double c = static_cast<double>(n_) / static_cast<double>(n_ - k_);
    const Eigen::MatrixXd cov = c * Ainv * M * Ainv;
    se_.resize(k_);
    for (std::size_t i = 0; i < k_; ++i)
        se_[i] = std::sqrt(std::max(0.0, cov(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(i))));
}

}  // namespace aklab
