#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "contractive/errors.hpp"

namespace contractive {

/// A point of R^n. Coordinates are finite; use make_point() to enforce it at the boundary.
using Point = Eigen::VectorXd;

Point make_point(std::initializer_list<double> coords);
Point make_point(const std::vector<double>& coords);
void require_finite(const Point& x, const char* what);

/// Euclidean, p-norm (p >= 1) or max-norm on R^n. Only the euclidean norm carries an inner product.
class NormSpec {
public:
    enum class Kind { euclidean, p_norm, max_norm };

    static NormSpec euclidean() { return NormSpec(Kind::euclidean, 2.0); }
    static NormSpec p_norm(double p);
    static NormSpec max_norm() { return NormSpec(Kind::max_norm, std::numeric_limits<double>::infinity()); }

    Kind kind() const noexcept { return kind_; }
    double p() const noexcept { return p_; }
    bool has_inner_product() const noexcept { return kind_ == Kind::euclidean; }
    std::string to_string() const;

    friend bool operator==(const NormSpec&, const NormSpec&) = default;

private:
    NormSpec(Kind kind, double p) : kind_(kind), p_(p) {}
    Kind kind_;
    double p_;
};

template <typename Derived>
double norm(const Eigen::MatrixBase<Derived>& x, const NormSpec& spec) {
    switch (spec.kind()) {
        case NormSpec::Kind::euclidean:
            return x.norm();
        case NormSpec::Kind::max_norm:
            return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
        case NormSpec::Kind::p_norm: {
            if (spec.p() == 1.0) return x.cwiseAbs().sum();
            // Scale by the largest entry so that |x_i|^p cannot overflow.
            const double scale = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
            if (scale == 0.0) return 0.0;
            const double sum = (x.cwiseAbs() / scale).array().pow(spec.p()).sum();
            return scale * std::pow(sum, 1.0 / spec.p());
        }
    }
    return 0.0;
}

template <typename A, typename B>
double distance(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y, const NormSpec& spec) {
    if (x.size() != y.size()) {
        throw DimensionMismatch("distance: dimensions " + std::to_string(x.size()) + " and " +
                                std::to_string(y.size()) + " differ");
    }
    return norm(x - y, spec);
}

/// Inner product; only defined when the active norm is euclidean.
template <typename A, typename B>
double inner(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y, const NormSpec& spec) {
    if (!spec.has_inner_product()) {
        throw UnsupportedStructure("inner product requested under " + spec.to_string() + " norm");
    }
    if (x.size() != y.size()) {
        throw DimensionMismatch("inner: dimensions " + std::to_string(x.size()) + " and " +
                                std::to_string(y.size()) + " differ");
    }
    return x.dot(y);
}

/// Convex region of R^n: an axis-aligned box or a closed euclidean ball.
class Domain {
public:
    enum class Shape { box, ball };

    static Domain box(Point lower, Point upper);
    static Domain ball(Point center, double radius);
    /// Box given by one interval per coordinate.
    static Domain interval(double lower, double upper) { return box(make_point({lower}), make_point({upper})); }

    Shape shape() const noexcept { return shape_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(lower_.size()); }
    bool contains(const Point& x) const;

    /// Bounding box; equals the domain itself for boxes.
    const Point& lower() const noexcept { return lower_; }
    const Point& upper() const noexcept { return upper_; }
    const Point& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }

    bool has_interior() const;
    std::string to_string() const;

    friend bool operator==(const Domain&, const Domain&);

private:
    Domain() = default;
    Shape shape_ = Shape::box;
    Point lower_;
    Point upper_;
    Point center_;
    double radius_ = 0.0;
};

/// Deterministic generator; draws are derived from raw 64-bit output so samples do not
/// depend on the standard library's distribution implementations.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n; }
    double normal();

    Point uniform_in(const Domain& d);
    Point on_boundary(const Domain& d);
    Point unit_direction(std::size_t dim);

private:
    std::mt19937_64 engine_;
};

enum class SampleStrategy { uniform, grid, near_diagonal, boundary };

std::string to_string(SampleStrategy s);
SampleStrategy parse_strategy(const std::string& name);

struct SampleOptions {
    double eps_near = 1e-3;
};

using PointPair = std::pair<Point, Point>;

struct PairSample {
    SampleStrategy strategy = SampleStrategy::uniform;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    double eps_near = 1e-3;
    std::vector<PointPair> pairs;

    std::size_t size() const noexcept { return pairs.size(); }
    bool empty() const noexcept { return pairs.empty(); }
    auto begin() const { return pairs.begin(); }
    auto end() const { return pairs.end(); }
};

struct PointSample {
    SampleStrategy strategy = SampleStrategy::uniform;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::vector<Point> points;

    std::size_t size() const noexcept { return points.size(); }
    auto begin() const { return points.begin(); }
    auto end() const { return points.end(); }
};

/// All domain nodes of a grid with `nodes_per_axis` nodes per coordinate (ball domains keep
/// the nodes inside the ball), in lexicographic order.
std::vector<Point> grid_nodes(const Domain& d, std::size_t nodes_per_axis);

/// Every ordered pair (x, y), x != y, of grid nodes in lexicographic order.
PairSample grid_pairs(const Domain& d, std::size_t nodes_per_axis);

/// `count` ordered pairs with x != y. For the grid strategy the grid has `count` nodes per axis
/// and its ordered pairs are truncated to the first `count`; use grid_pairs() for all of them.
PairSample sample_pairs(const Domain& d, SampleStrategy strategy, std::size_t count, std::uint64_t seed,
                        const SampleOptions& options = {});

PointSample sample_points(const Domain& d, std::size_t count, std::uint64_t seed);

}  // namespace contractive
