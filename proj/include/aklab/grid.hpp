#pragma once

#include <cstddef>
#include <vector>

namespace aklab {

/// Uniform partition of [0, t_end], t_end <= 1, with n subintervals.
///
/// Node times are j * (t_end / n); refining by an integer factor keeps every
/// existing node time bit-identical, which the bridge-consistent Brownian
/// sampler relies on.
class Grid {
public:
    Grid(int n, double t_end);

    static Grid uniform(int n, double t_end = 1.0) { return Grid(n, t_end); }

    int intervals() const { return n_; }
    std::size_t num_nodes() const { return static_cast<std::size_t>(n_) + 1; }
    double t_end() const { return t_end_; }
    double mesh() const { return dt_; }
    double dt() const { return dt_; }

    double node(std::size_t j) const { return static_cast<double>(j) * dt_; }
    std::vector<double> nodes() const;

    Grid refined(int factor) const;

    /// Index of the node with time t; throws if t is not a node.
    std::size_t index_of(double t) const;
    bool has_node(double t) const;

private:
    int n_;
    double t_end_;
    double dt_;
};

/// Spec'd constructor: n >= 1 equally spaced intervals, t_end in (0, 1].
Grid make_grid(int n, double t_end);

}  // namespace aklab
