#include "kf/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kf/field.hpp"
#include "kf/parallel.hpp"

namespace kf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_dims(const GridDims& d) {
    if (d.nx < 2 || d.ny < 2 || d.nz < 2)
        throw std::invalid_argument("grid: dims must be >= 2 per axis");
}

void check_bounds(const Box3& b) {
    if (!(b.hi.x > b.lo.x && b.hi.y > b.lo.y && b.hi.z > b.lo.z))
        throw std::invalid_argument("grid: bounds must have positive extent");
}

}  // namespace

std::string quantity_name(Quantity q) {
    switch (q) {
        case Quantity::chi: return "chi";
        case Quantity::f: return "f";
        case Quantity::eta: return "eta";
        case Quantity::energy: return "energy";
        case Quantity::B: return "B";
        case Quantity::A_smooth: return "A_smooth";
        case Quantity::A_naive: return "A_naive";
        case Quantity::custom: return "custom";
    }
    return "custom";
}

bool quantity_is_vector(Quantity q) {
    return q == Quantity::B || q == Quantity::A_smooth || q == Quantity::A_naive;
}

bool quantity_is_circular(Quantity q) { return q == Quantity::f || q == Quantity::eta; }

Vec3 ScalarGrid::spacing() const {
    return {(bounds.hi.x - bounds.lo.x) / (dims.nx - 1),
            (bounds.hi.y - bounds.lo.y) / (dims.ny - 1),
            (bounds.hi.z - bounds.lo.z) / (dims.nz - 1)};
}

Point3 ScalarGrid::position(int i, int j, int k) const {
    const Vec3 h = spacing();
    return {bounds.lo.x + h.x * i, bounds.lo.y + h.y * j, bounds.lo.z + h.z * k};
}

double ScalarGrid::interpolate(const Point3& p) const {
    const Vec3 h = spacing();
    double fx = (p.x - bounds.lo.x) / h.x;
    double fy = (p.y - bounds.lo.y) / h.y;
    double fz = (p.z - bounds.lo.z) / h.z;
    const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, dims.nx - 2);
    const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, dims.ny - 2);
    const int k = std::clamp(static_cast<int>(std::floor(fz)), 0, dims.nz - 2);
    fx -= i;
    fy -= j;
    fz -= k;
    if (fx < -1e-9 || fy < -1e-9 || fz < -1e-9 || fx > 1.0 + 1e-9 || fy > 1.0 + 1e-9 ||
        fz > 1.0 + 1e-9)
        return kNaN;
    double c[2][2][2];
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) c[di][dj][dk] = at(i + di, j + dj, k + dk);
    auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
    double c00 = lerp(c[0][0][0], c[1][0][0], fx);
    double c10 = lerp(c[0][1][0], c[1][1][0], fx);
    double c01 = lerp(c[0][0][1], c[1][0][1], fx);
    double c11 = lerp(c[0][1][1], c[1][1][1], fx);
    return lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz);
}

Vec3 VectorGrid::spacing() const {
    return {(bounds.hi.x - bounds.lo.x) / (dims.nx - 1),
            (bounds.hi.y - bounds.lo.y) / (dims.ny - 1),
            (bounds.hi.z - bounds.lo.z) / (dims.nz - 1)};
}

Point3 VectorGrid::position(int i, int j, int k) const {
    const Vec3 h = spacing();
    return {bounds.lo.x + h.x * i, bounds.lo.y + h.y * j, bounds.lo.z + h.z * k};
}

ScalarGrid sample_scalar_grid(const RationalMap& map, Quantity q, const Box3& bounds,
                              const GridDims& dims) {
    check_dims(dims);
    check_bounds(bounds);
    if (quantity_is_vector(q)) throw std::invalid_argument("grid: vector quantity on scalar grid");
    ScalarGrid g;
    g.bounds = bounds;
    g.dims = dims;
    g.quantity = q;
    g.values.assign(dims.count(), 0.0);
    parallel_for(static_cast<int64_t>(dims.nz), [&](int64_t k) {
        for (int j = 0; j < dims.ny; ++j) {
            for (int i = 0; i < dims.nx; ++i) {
                const Point3 p = g.position(i, static_cast<int>(j), static_cast<int>(k));
                const MapEval ev = eval_map(map, p);
                double val = kNaN;
                switch (q) {
                    case Quantity::chi:
                        val = std::norm(ev.P) / ev.norm2_sum;
                        break;
                    case Quantity::f: {
                        const GaugePhase gp = gauge_phase(ev);
                        val = gp.valid ? gp.f : kNaN;
                        break;
                    }
                    case Quantity::eta: {
                        const EulerPotentials ep = euler_potentials(ev);
                        val = ep.eta_valid ? ep.eta : kNaN;
                        break;
                    }
                    case Quantity::energy:
                        val = norm2(bfield(ev, p));
                        break;
                    default:
                        throw std::invalid_argument("grid: unsupported scalar quantity");
                }
                g.values[g.index(i, j, static_cast<int>(k))] = val;
            }
        }
    });
    return g;
}

VectorGrid sample_vector_grid(const RationalMap& map, Quantity q, const Box3& bounds,
                              const GridDims& dims) {
    check_dims(dims);
    check_bounds(bounds);
    if (!quantity_is_vector(q)) throw std::invalid_argument("grid: scalar quantity on vector grid");
    VectorGrid g;
    g.bounds = bounds;
    g.dims = dims;
    g.quantity = q;
    g.values.assign(dims.count(), Vec3{});
    parallel_for(static_cast<int64_t>(dims.nz), [&](int64_t k) {
        for (int j = 0; j < dims.ny; ++j) {
            for (int i = 0; i < dims.nx; ++i) {
                const Point3 p = g.position(i, static_cast<int>(j), static_cast<int>(k));
                const MapEval ev = eval_map(map, p);
                Vec3 val{};
                switch (q) {
                    case Quantity::B:
                        val = bfield(ev, p);
                        break;
                    case Quantity::A_smooth:
                        val = vecpot_smooth(ev, p);
                        break;
                    case Quantity::A_naive: {
                        const PotentialSample ps = vecpot_naive(ev);
                        val = ps.valid ? ps.A : Vec3{kNaN, kNaN, kNaN};
                        break;
                    }
                    default:
                        throw std::invalid_argument("grid: unsupported vector quantity");
                }
                g.values[g.index(i, j, static_cast<int>(k))] = val;
            }
        }
    });
    return g;
}

}  // namespace kf
