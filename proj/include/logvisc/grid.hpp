// Uniform Cartesian grid with MAC staggering conventions.  Scalars and
// tensors live at cell centers; velocity component `ax` lives on the faces
// normal to axis `ax` (face i is the left face of cell i, so its coordinate
// along `ax` is i * dx).
#pragma once

#include <array>
#include <cstdint>

#include "util.hpp"

namespace logvisc {

enum class BoundaryMode { periodic, no_slip_walls };

template <int D>
struct Grid {
    std::array<int, D>    n{};      // cells per axis
    std::array<double, D> length{}; // domain extent per axis
    BoundaryMode          mode = BoundaryMode::periodic;

    Grid() = default;
    Grid(std::array<int, D> n_, std::array<double, D> len_, BoundaryMode m)
        : n(n_), length(len_), mode(m) {
        for (int ax = 0; ax < D; ++ax)
            if (n[ax] < 1 || !(length[ax] > 0.0))
                throw ConfigError("Grid: cell counts must be >= 1 and lengths positive");
    }

    double dx(int ax) const { return length[ax] / n[ax]; }

    double cell_volume() const {
        double v = 1.0;
        for (int ax = 0; ax < D; ++ax) v *= dx(ax);
        return v;
    }

    std::int64_t cell_count() const {
        std::int64_t c = 1;
        for (int ax = 0; ax < D; ++ax) c *= n[ax];
        return c;
    }

    /// Linear index with x fastest.
    std::int64_t cell_index(const std::array<int, D>& idx) const {
        std::int64_t lin    = 0;
        std::int64_t stride = 1;
        for (int ax = 0; ax < D; ++ax) {
            lin += idx[ax] * stride;
            stride *= n[ax];
        }
        return lin;
    }

    std::array<int, D> cell_coords(std::int64_t lin) const {
        std::array<int, D> idx{};
        for (int ax = 0; ax < D; ++ax) {
            idx[ax] = static_cast<int>(lin % n[ax]);
            lin /= n[ax];
        }
        return idx;
    }

    Vec<D> cell_center(const std::array<int, D>& idx) const {
        Vec<D> x{};
        for (int ax = 0; ax < D; ++ax) x[ax] = (idx[ax] + 0.5) * dx(ax);
        return x;
    }

    /// Wrap (periodic) or clamp (walls) a cell index along an axis.
    int fold(int i, int ax) const {
        if (mode == BoundaryMode::periodic) {
            const int m = n[ax];
            i %= m;
            return i < 0 ? i + m : i;
        }
        if (i < 0) return 0;
        if (i >= n[ax]) return n[ax] - 1;
        return i;
    }

    bool operator==(const Grid& o) const {
        return n == o.n && length == o.length && mode == o.mode;
    }
};

} // namespace logvisc
