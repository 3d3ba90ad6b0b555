#pragma once

#include <map>
#include <string>
#include <vector>

#include "kf/vec.hpp"

namespace kf {

// Ordered polyline in 3-space. For closed curves the first vertex is not
// repeated at the end; segment (last, first) is implied.
struct Curve {
    std::vector<Point3> vertices;
    bool closed = false;
    double closure_gap = 0.0;  // distance between last and first vertex
    double arc_length = 0.0;   // sum of segment lengths (incl. closing segment if closed)
    std::map<std::string, double> tags;

    size_t segment_count() const {
        if (vertices.size() < 2) return 0;
        return closed ? vertices.size() : vertices.size() - 1;
    }
    void recompute_metrics();
};

// Uniform arc-length resampling to n vertices (linear interpolation).
Curve resample_uniform(const Curve& c, size_t n);

Curve reversed(const Curve& c);

double point_to_curve_distance(const Point3& p, const Curve& c);

// min over all vertex/segment combinations; adequate for well-separated curves.
double min_curve_distance(const Curve& a, const Curve& b);

// Symmetric Hausdorff distance between polylines (vertices vs. segments).
double hausdorff_distance(const Curve& a, const Curve& b);

double max_segment_length(const Curve& c);

// Transversal self-crossing count of the projection of a closed polyline
// along direction `dir` (knot-diagram crossing diagnostic).
int projected_crossing_count(const Curve& c, const Vec3& dir);

}  // namespace kf
