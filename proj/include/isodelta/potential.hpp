#pragma once

#include "isodelta/grid.hpp"

namespace isodelta {

/// delta_strength * delta(x) + tail(x). A jump of the tail at x = 0 is carried by a
/// break at the origin node of `tail`.
struct SingularPotential {
    double delta_strength{};
    GridFunction tail;

    const Grid& grid() const noexcept { return tail.grid(); }
};

/// Jump f(0+) - f(0-) at the origin node (zero when f is continuous there).
inline double origin_jump(const GridFunction& f) {
    const auto o = f.grid().origin_index();
    if (!o) return 0.0;
    return f.right(*o) - f.left(*o);
}

}  // namespace isodelta
