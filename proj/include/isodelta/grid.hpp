#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isodelta/errors.hpp"

namespace isodelta {

enum class Side { Left, Right };

/// Uniform 1D grid. Node i sits at x_min + i*h with h = (x_max - x_min)/(n_points - 1).
class Grid {
public:
    Grid(double x_min, double x_max, std::size_t n_points)
        : x_min_(x_min), x_max_(x_max), n_(n_points) {
        if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
            throw InvalidInput("grid bounds must be finite with x_max > x_min");
        if (n_points < 3) throw InvalidInput("grid needs at least 3 points");
    }

    /// [-half_width, half_width] with an odd number of points, so x=0 is node (n-1)/2.
    static Grid symmetric(double half_width, std::size_t n_points) {
        if (n_points % 2 == 0) throw InvalidInput("symmetric grid needs an odd number of points");
        return Grid(-half_width, half_width, n_points);
    }

    /// Symmetric grid with spacing as close to h as the odd point count allows.
    static Grid symmetric_with_spacing(double half_width, double h) {
        auto half = static_cast<std::size_t>(std::llround(half_width / h));
        return symmetric(half_width, 2 * half + 1);
    }

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return (x_max_ - x_min_) / static_cast<double>(n_ - 1); }

    double x(std::size_t i) const noexcept {
        if (auto o = origin_index(); o && *o == i) return 0.0;
        if (i + 1 == n_) return x_max_;
        return x_min_ + (x_max_ - x_min_) * (static_cast<double>(i) / static_cast<double>(n_ - 1));
    }

    /// Index of the node at x = 0, if one exists.
    std::optional<std::size_t> origin_index() const noexcept {
        const double h = spacing();
        const double r = std::round(-x_min_ / h);
        if (r < 0.0 || r > static_cast<double>(n_ - 1)) return std::nullopt;
        const double xr = x_min_ + (x_max_ - x_min_) * (r / static_cast<double>(n_ - 1));
        if (std::abs(xr) > 1e-9 * h) return std::nullopt;
        return static_cast<std::size_t>(r);
    }

    /// Nearest node to x (clamped to the grid).
    std::size_t nearest(double x) const noexcept {
        const double r = std::round((x - x_min_) / spacing());
        return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n_ - 1)));
    }

    /// Every other node. Requires an odd point count.
    std::optional<Grid> coarsened() const {
        if (n_ % 2 == 0 || n_ < 5) return std::nullopt;
        return Grid(x_min_, x_max_, (n_ + 1) / 2);
    }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
    }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
};

/// Node where a function is not smooth. left/right are the one-sided limits;
/// a kink has left == right, a jump does not.
struct Break {
    std::size_t index{};
    double left{};
    double right{};
};

/// Real function sampled on a Grid.
///
/// Recorded breaks carry one-sided limits: integration and differentiation never
/// build a stencil across one. Singular nodes are the only nodes allowed to hold
/// non-finite values.
class GridFunction {
public:
    /// Minimum node distance between a break and a boundary or another break.
    static constexpr std::size_t kBreakMargin = 3;

    GridFunction(Grid grid, std::vector<double> values, std::vector<Break> breaks = {},
                 std::vector<std::size_t> singular = {})
        : grid_(grid), values_(std::move(values)), breaks_(std::move(breaks)),
          singular_(std::move(singular)) {
        if (values_.size() != grid_.size())
            throw InvalidInput("grid function length " + std::to_string(values_.size()) +
                               " does not match grid size " + std::to_string(grid_.size()));
        std::sort(breaks_.begin(), breaks_.end(),
                  [](const Break& a, const Break& b) { return a.index < b.index; });
        std::sort(singular_.begin(), singular_.end());
        singular_.erase(std::unique(singular_.begin(), singular_.end()), singular_.end());
        for (std::size_t k = 0; k < breaks_.size(); ++k) {
            const auto& b = breaks_[k];
            if (b.index < kBreakMargin || b.index + kBreakMargin >= grid_.size())
                throw InvalidInput("break node too close to the grid boundary");
            if (k > 0 && b.index < breaks_[k - 1].index + kBreakMargin)
                throw InvalidInput("break nodes too close together");
            values_[b.index] = 0.5 * (b.left + b.right);
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]) && !is_singular(i))
                throw NonFiniteInput("non-finite value at unflagged node " + std::to_string(i));
        }
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double x(std::size_t i) const noexcept { return grid_.x(i); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<Break>& breaks() const noexcept { return breaks_; }
    const std::vector<std::size_t>& singular_nodes() const noexcept { return singular_; }

    const Break* find_break(std::size_t i) const noexcept {
        auto it = std::lower_bound(breaks_.begin(), breaks_.end(), i,
                                   [](const Break& b, std::size_t j) { return b.index < j; });
        return (it != breaks_.end() && it->index == i) ? &*it : nullptr;
    }
    bool is_break(std::size_t i) const noexcept { return find_break(i) != nullptr; }
    bool is_singular(std::size_t i) const noexcept {
        return std::binary_search(singular_.begin(), singular_.end(), i);
    }

    double left(std::size_t i) const noexcept {
        const Break* b = find_break(i);
        return b ? b->left : values_[i];
    }
    double right(std::size_t i) const noexcept {
        const Break* b = find_break(i);
        return b ? b->right : values_[i];
    }
    double limit(std::size_t i, Side side) const noexcept {
        return side == Side::Left ? left(i) : right(i);
    }

    /// Value at node j as seen from node i (the limit facing i).
    double seen_from(std::size_t j, std::size_t i) const noexcept {
        if (j > i) return left(j);
        if (j < i) return right(j);
        return values_[j];
    }

    bool has_singular_nodes() const noexcept { return !singular_.empty(); }

private:
    Grid grid_;
    std::vector<double> values_;
    std::vector<Break> breaks_;
    std::vector<std::size_t> singular_;
};

// ---------------------------------------------------------------------------
// Sampling and pointwise algebra

template <class F>
GridFunction sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.x(i));
    return GridFunction(grid, std::move(v));
}

/// Samples f(x, side). Off-origin nodes use the side of their sign; an interior
/// origin node becomes a break carrying both one-sided limits.
template <class F>
GridFunction sample_sided(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    std::vector<Break> breaks;
    const auto origin = grid.origin_index();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = grid.x(i);
        if (origin && *origin == i) {
            const bool interior = i >= GridFunction::kBreakMargin &&
                                  i + GridFunction::kBreakMargin < grid.size();
            if (interior) {
                breaks.push_back({i, f(0.0, Side::Left), f(0.0, Side::Right)});
                v[i] = 0.5 * (breaks.back().left + breaks.back().right);
            } else {
                v[i] = f(0.0, i == 0 ? Side::Right : Side::Left);
            }
        } else {
            v[i] = f(x, x < 0.0 ? Side::Left : Side::Right);
        }
    }
    return GridFunction(grid, std::move(v), std::move(breaks));
}

template <class Fn>
GridFunction map(const GridFunction& a, Fn&& fn) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(a[i]);
    std::vector<Break> breaks;
    breaks.reserve(a.breaks().size());
    for (const auto& b : a.breaks()) breaks.push_back({b.index, fn(b.left), fn(b.right)});
    return GridFunction(a.grid(), std::move(v), std::move(breaks), a.singular_nodes());
}

template <class Fn>
GridFunction zip(const GridFunction& a, const GridFunction& b, Fn&& fn) {
    if (!(a.grid() == b.grid())) throw InvalidInput("grid functions live on different grids");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(a[i], b[i]);
    std::vector<std::size_t> idx;
    for (const auto& br : a.breaks()) idx.push_back(br.index);
    for (const auto& br : b.breaks()) idx.push_back(br.index);
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<Break> breaks;
    for (auto i : idx) breaks.push_back({i, fn(a.left(i), b.left(i)), fn(a.right(i), b.right(i))});
    std::vector<std::size_t> singular(a.singular_nodes());
    singular.insert(singular.end(), b.singular_nodes().begin(), b.singular_nodes().end());
    return GridFunction(a.grid(), std::move(v), std::move(breaks), std::move(singular));
}

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](double p, double q) { return p + q; });
}
inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](double p, double q) { return p - q; });
}
inline GridFunction operator*(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](double p, double q) { return p * q; });
}
inline GridFunction operator/(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](double p, double q) { return p / q; });
}
inline GridFunction operator*(double s, const GridFunction& a) {
    return map(a, [s](double p) { return s * p; });
}
inline GridFunction operator+(const GridFunction& a, double s) {
    return map(a, [s](double p) { return p + s; });
}
inline GridFunction operator-(const GridFunction& a) {
    return map(a, [](double p) { return -p; });
}

/// Largest |f| over all finite node values and break limits.
inline double max_abs(const GridFunction& f) {
    double m = 0.0;
    auto take = [&m](double v) {
        if (std::isfinite(v)) m = std::max(m, std::abs(v));
    };
    for (double v : f.values()) take(v);
    for (const auto& b : f.breaks()) {
        take(b.left);
        take(b.right);
    }
    return m;
}

/// Largest |a - b| over nodes accepted by keep(i), comparing both limits at breaks.
template <class Keep>
double max_abs_difference(const GridFunction& a, const GridFunction& b, Keep&& keep) {
    if (!(a.grid() == b.grid())) throw InvalidInput("grid functions live on different grids");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!keep(i) || a.is_singular(i) || b.is_singular(i)) continue;
        m = std::max({m, std::abs(a.left(i) - b.left(i)), std::abs(a.right(i) - b.right(i))});
    }
    return m;
}

inline double max_abs_difference(const GridFunction& a, const GridFunction& b) {
    return max_abs_difference(a, b, [](std::size_t) { return true; });
}

/// Every other node of f; breaks must sit on even nodes to survive.
inline std::optional<GridFunction> subsample(const GridFunction& f) {
    auto coarse = f.grid().coarsened();
    if (!coarse) return std::nullopt;
    std::vector<double> v(coarse->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[2 * i];
    std::vector<Break> breaks;
    for (const auto& b : f.breaks()) {
        if (b.index % 2 != 0) return std::nullopt;
        const std::size_t j = b.index / 2;
        if (j < GridFunction::kBreakMargin || j + GridFunction::kBreakMargin >= coarse->size())
            return std::nullopt;
        breaks.push_back({j, b.left, b.right});
    }
    std::vector<std::size_t> singular;
    for (auto s : f.singular_nodes())
        if (s % 2 == 0) singular.push_back(s / 2);
    return GridFunction(*coarse, std::move(v), std::move(breaks), std::move(singular));
}

}  // namespace isodelta
