#include "aklab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aklab {

Grid::Grid(int n, double t_end) : n_(n), t_end_(t_end) {
    if (n < 1) throw std::invalid_argument("Grid: n must be >= 1");
    if (!(t_end > 0.0) || t_end > 1.0)
        throw std::invalid_argument("Grid: t_end must lie in (0, 1]");
    dt_ = t_end / static_cast<double>(n);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out(num_nodes());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = node(j);
    out.back() = t_end_;
    return out;
}

Grid Grid::refined(int factor) const {
    if (factor < 1) throw std::invalid_argument("Grid::refined: factor must be >= 1");
    return Grid(n_ * factor, t_end_);
}

bool Grid::has_node(double t) const {
    if (t < 0.0 || t > t_end_ + 0.5 * dt_) return false;
    const double j = t / dt_;
    const double jr = std::round(j);
    if (jr < 0 || jr > static_cast<double>(n_)) return false;
    // Accept only exact node times up to a few ulps.
    return std::fabs(node(static_cast<std::size_t>(jr)) - t) <=
           4.0 * 1e-16 * std::max(1.0, std::fabs(t));
}

std::size_t Grid::index_of(double t) const {
    if (!has_node(t)) throw std::invalid_argument("Grid: time is not a grid node");
    return static_cast<std::size_t>(std::llround(t / dt_));
}

Grid make_grid(int n, double t_end) {
    if (n < 1) throw std::invalid_argument("make_grid: n must be a positive integer");
    if (!(t_end > 0.0) || t_end > 1.0)
        throw std::invalid_argument("make_grid: t_end must lie in (0, 1]");
    return Grid(n, t_end);
}

}  // namespace aklab
