#pragma once

#include <string>
#include <vector>

#include "kf/ratmap.hpp"
#include "kf/vec.hpp"

namespace kf {

struct Box3 {
    Vec3 lo{-3, -3, -3};
    Vec3 hi{3, 3, 3};
};

enum class Quantity { chi, f, eta, energy, B, A_smooth, A_naive, custom };

std::string quantity_name(Quantity q);
bool quantity_is_vector(Quantity q);
// Circle-valued scalars need the branch-cut treatment when contoured.
bool quantity_is_circular(Quantity q);

struct GridDims {
    int nx = 2, ny = 2, nz = 2;
    size_t count() const { return static_cast<size_t>(nx) * ny * nz; }
};

// Regular axis-aligned lattice, values in x-fastest order. Invalid samples
// (e.g. eta at a pole) are stored as quiet NaN.
struct ScalarGrid {
    Box3 bounds;
    GridDims dims;
    Quantity quantity = Quantity::custom;
    std::vector<double> values;

    Vec3 spacing() const;
    Point3 position(int i, int j, int k) const;
    size_t index(int i, int j, int k) const {
        return static_cast<size_t>(i) +
               static_cast<size_t>(dims.nx) * (j + static_cast<size_t>(dims.ny) * k);
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    // Trilinear interpolation (NaN if any surrounding sample is invalid).
    double interpolate(const Point3& p) const;
};

struct VectorGrid {
    Box3 bounds;
    GridDims dims;
    Quantity quantity = Quantity::custom;
    std::vector<Vec3> values;

    Vec3 spacing() const;
    Point3 position(int i, int j, int k) const;
    size_t index(int i, int j, int k) const {
        return static_cast<size_t>(i) +
               static_cast<size_t>(dims.nx) * (j + static_cast<size_t>(dims.ny) * k);
    }
};

ScalarGrid sample_scalar_grid(const RationalMap& map, Quantity q, const Box3& bounds,
                              const GridDims& dims);
VectorGrid sample_vector_grid(const RationalMap& map, Quantity q, const Box3& bounds,
                              const GridDims& dims);

}  // namespace kf
