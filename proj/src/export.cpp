#include "kf/export.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kf {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export: cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw std::runtime_error("export: write failure on '" + path + "'");
}

// 9 significant digits; NaN normalized so output is byte-stable.
std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void write_vtk(const ScalarGrid& grid, const std::string& path, const std::string& comment) {
    std::ofstream out = open_out(path);
    const Vec3 h = grid.spacing();
    out << "# vtk DataFile Version 3.0\n"
        << quantity_name(grid.quantity) << " grid" << (comment.empty() ? "" : " ") << comment
        << "\nASCII\nDATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << grid.dims.nx << ' ' << grid.dims.ny << ' ' << grid.dims.nz << '\n';
    out << "ORIGIN " << num(grid.bounds.lo.x) << ' ' << num(grid.bounds.lo.y) << ' '
        << num(grid.bounds.lo.z) << '\n';
    out << "SPACING " << num(h.x) << ' ' << num(h.y) << ' ' << num(h.z) << '\n';
    out << "POINT_DATA " << grid.values.size() << '\n';
    out << "SCALARS " << quantity_name(grid.quantity) << " double 1\nLOOKUP_TABLE default\n";
    for (double v : grid.values) out << num(v) << '\n';
    finish(out, path);
}

void write_vtk(const VectorGrid& grid, const std::string& path, const std::string& comment) {
    std::ofstream out = open_out(path);
    const Vec3 h = grid.spacing();
    out << "# vtk DataFile Version 3.0\n"
        << quantity_name(grid.quantity) << " grid" << (comment.empty() ? "" : " ") << comment
        << "\nASCII\nDATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << grid.dims.nx << ' ' << grid.dims.ny << ' ' << grid.dims.nz << '\n';
    out << "ORIGIN " << num(grid.bounds.lo.x) << ' ' << num(grid.bounds.lo.y) << ' '
        << num(grid.bounds.lo.z) << '\n';
    out << "SPACING " << num(h.x) << ' ' << num(h.y) << ' ' << num(h.z) << '\n';
    out << "POINT_DATA " << grid.values.size() << '\n';
    out << "VECTORS " << quantity_name(grid.quantity) << " double\n";
    for (const Vec3& v : grid.values)
        out << num(v.x) << ' ' << num(v.y) << ' ' << num(v.z) << '\n';
    finish(out, path);
}

void write_vtk(const std::vector<Curve>& curves, const std::vector<TriMesh>& meshes,
               const std::string& path, const std::string& comment) {
    std::ofstream out = open_out(path);
    size_t n_points = 0;
    for (const Curve& c : curves) n_points += c.vertices.size();
    for (const TriMesh& m : meshes) n_points += m.vertices.size();
    out << "# vtk DataFile Version 3.0\ncurves and surfaces" << (comment.empty() ? "" : " ")
        << comment << "\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << n_points << " double\n";
    for (const Curve& c : curves)
        for (const Point3& p : c.vertices)
            out << num(p.x) << ' ' << num(p.y) << ' ' << num(p.z) << '\n';
    for (const TriMesh& m : meshes)
        for (const Point3& p : m.vertices)
            out << num(p.x) << ' ' << num(p.y) << ' ' << num(p.z) << '\n';

    if (!curves.empty()) {
        size_t total = 0;
        for (const Curve& c : curves) total += c.vertices.size() + (c.closed ? 1 : 0);
        out << "LINES " << curves.size() << ' ' << (total + curves.size()) << '\n';
        size_t base = 0;
        for (const Curve& c : curves) {
            const size_t n = c.vertices.size();
            out << (n + (c.closed ? 1 : 0));
            for (size_t i = 0; i < n; ++i) out << ' ' << (base + i);
            if (c.closed) out << ' ' << base;  // repeat first index to close
            out << '\n';
            base += n;
        }
    }
    if (!meshes.empty()) {
        size_t curve_points = 0;
        for (const Curve& c : curves) curve_points += c.vertices.size();
        size_t n_tri = 0;
        for (const TriMesh& m : meshes) n_tri += m.triangles.size();
        out << "POLYGONS " << n_tri << ' ' << 4 * n_tri << '\n';
        size_t base = curve_points;
        for (const TriMesh& m : meshes) {
            for (const auto& t : m.triangles)
                out << "3 " << (base + t[0]) << ' ' << (base + t[1]) << ' ' << (base + t[2])
                    << '\n';
            base += m.vertices.size();
        }
    }
    finish(out, path);
}

void write_obj(const TriMesh& mesh, const std::string& path, const std::string& comment) {
    std::ofstream out = open_out(path);
    if (!comment.empty()) out << "# " << comment << '\n';
    for (const Point3& p : mesh.vertices)
        out << "v " << num(p.x) << ' ' << num(p.y) << ' ' << num(p.z) << '\n';
    for (const auto& t : mesh.triangles)
        out << "f " << (t[0] + 1) << ' ' << (t[1] + 1) << ' ' << (t[2] + 1) << '\n';
    finish(out, path);
}

void write_csv(const Curve& curve, const std::string& path, const std::string& comment) {
    std::ofstream out = open_out(path);
    out << "# closed=" << (curve.closed ? 1 : 0) << " closure_gap=" << num(curve.closure_gap)
        << " arc_length=" << num(curve.arc_length)
        << (comment.empty() ? "" : " ") << comment << '\n';
    out << "x,y,z\n";
    for (const Point3& p : curve.vertices)
        out << num(p.x) << ',' << num(p.y) << ',' << num(p.z) << '\n';
    finish(out, path);
}

Curve read_csv_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("export: cannot open '" + path + "' for reading");
    Curve c;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("closed=1") != std::string::npos) c.closed = true;
            continue;
        }
        if (!have_columns) {
            if (line.rfind("x,y,z", 0) != 0)
                throw std::runtime_error("export: unexpected CSV header '" + line + "'");
            have_columns = true;
            continue;
        }
        Point3 p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.x, &p.y, &p.z) != 3)
            throw std::runtime_error("export: malformed CSV row '" + line + "'");
        c.vertices.push_back(p);
    }
    c.recompute_metrics();
    return c;
}

void write_csv(const ScalarGrid& grid, const std::string& path, const std::string& comment) {
    std::ofstream out = open_out(path);
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "x,y,z," << quantity_name(grid.quantity) << '\n';
    for (int k = 0; k < grid.dims.nz; ++k)
        for (int j = 0; j < grid.dims.ny; ++j)
            for (int i = 0; i < grid.dims.nx; ++i) {
                const Point3 p = grid.position(i, j, k);
                out << num(p.x) << ',' << num(p.y) << ',' << num(p.z) << ','
                    << num(grid.at(i, j, k)) << '\n';
            }
    finish(out, path);
}

void write_csv(const VectorGrid& grid, const std::string& path, const std::string& comment) {
    std::ofstream out = open_out(path);
    if (!comment.empty()) out << "# " << comment << '\n';
    const std::string name = quantity_name(grid.quantity);
    out << "x,y,z," << name << "x," << name << "y," << name << "z\n";
    for (int k = 0; k < grid.dims.nz; ++k)
        for (int j = 0; j < grid.dims.ny; ++j)
            for (int i = 0; i < grid.dims.nx; ++i) {
                const Point3 p = grid.position(i, j, k);
                const Vec3& v = grid.values[grid.index(i, j, k)];
                out << num(p.x) << ',' << num(p.y) << ',' << num(p.z) << ',' << num(v.x) << ','
                    << num(v.y) << ',' << num(v.z) << '\n';
            }
    finish(out, path);
}

}  // namespace kf
