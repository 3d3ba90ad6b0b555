#pragma once

#include <array>
#include <vector>

#include "kf/grid.hpp"

namespace kf {

struct TriMesh {
    std::vector<Point3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

// Marching cubes with the asymptotic decider on ambiguous faces. Cube/face
// contours are stitched into closed rings per cube, so adjacent cubes always
// agree along shared faces and the mesh is watertight away from data
// boundaries and invalid samples. Circle-valued grids (f, eta) are recentered
// so the requested level maps to 0.5 and cells straddling the branch cut are
// masked. NaN samples poison their cubes.
TriMesh isosurface(const ScalarGrid& grid, double level);

}  // namespace kf
