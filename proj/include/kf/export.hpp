#pragma once

#include <string>
#include <vector>

#include "kf/curve.hpp"
#include "kf/grid.hpp"
#include "kf/marching.hpp"

namespace kf {

// Legacy VTK ASCII ("# vtk DataFile Version 3.0"), 9 significant digits,
// deterministic ordering. Grids are STRUCTURED_POINTS; curves and meshes go
// into one POLYDATA (LINES + POLYGONS). Closed polylines repeat their first
// index. The optional comment (e.g. "seed=N") is embedded in each header.
void write_vtk(const ScalarGrid& grid, const std::string& path, const std::string& comment = {});
void write_vtk(const VectorGrid& grid, const std::string& path, const std::string& comment = {});
void write_vtk(const std::vector<Curve>& curves, const std::vector<TriMesh>& meshes,
               const std::string& path, const std::string& comment = {});

void write_obj(const TriMesh& mesh, const std::string& path, const std::string& comment = {});

// CSV: comment header carrying the closure flag, then a column-name row.
void write_csv(const Curve& curve, const std::string& path, const std::string& comment = {});
Curve read_csv_curve(const std::string& path);
void write_csv(const ScalarGrid& grid, const std::string& path, const std::string& comment = {});
void write_csv(const VectorGrid& grid, const std::string& path, const std::string& comment = {});

}  // namespace kf
