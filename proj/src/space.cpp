#include "contractive/space.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "contractive/format.hpp"

namespace contractive {

Point make_point(std::initializer_list<double> coords) {
    return make_point(std::vector<double>(coords));
}

Point make_point(const std::vector<double>& coords) {
    if (coords.empty()) throw PreconditionError("point must have at least one coordinate");
    Point x(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) x[static_cast<Eigen::Index>(i)] = coords[i];
    require_finite(x, "point");
    return x;
}

void require_finite(const Point& x, const char* what) {
    if (!x.allFinite()) throw PreconditionError(std::string(what) + " has a non-finite coordinate");
}

NormSpec NormSpec::p_norm(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("p-norm requires finite p >= 1, got " + format_double(p));
    if (p == 2.0) return euclidean();
    return NormSpec(Kind::p_norm, p);
}

std::string NormSpec::to_string() const {
    switch (kind_) {
        case Kind::euclidean: return "euclidean";
        case Kind::max_norm: return "max";
        case Kind::p_norm: return "p:" + format_double(p_);
    }
    return "?";
}

Domain Domain::box(Point lower, Point upper) {
    if (lower.size() == 0 || lower.size() != upper.size()) {
        throw DimensionMismatch("box bounds must have equal positive dimension");
    }
    require_finite(lower, "box lower bound");
    require_finite(upper, "box upper bound");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i]) throw PreconditionError("box lower bound exceeds upper bound in coordinate " + std::to_string(i + 1));
    }
    Domain d;
    d.shape_ = Shape::box;
    d.center_ = (lower + upper) / 2.0;
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    return d;
}

Domain Domain::ball(Point center, double radius) {
    if (center.size() == 0) throw DimensionMismatch("ball center must have positive dimension");
    require_finite(center, "ball center");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("ball radius must be positive and finite");
    Domain d;
    d.shape_ = Shape::ball;
    d.lower_ = center.array() - radius;
    d.upper_ = center.array() + radius;
    d.center_ = std::move(center);
    d.radius_ = radius;
    return d;
}

bool Domain::contains(const Point& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) return false;
    if (shape_ == Shape::box) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
        }
        return true;
    }
    const double r = (x - center_).norm();
    return r <= radius_ * (1.0 + 1e-12);
}

bool Domain::has_interior() const {
    if (shape_ == Shape::ball) return true;
    return ((upper_ - lower_).array() > 0.0).all();
}

std::string Domain::to_string() const {
    std::ostringstream os;
    if (shape_ == Shape::box) {
        for (Eigen::Index i = 0; i < lower_.size(); ++i) {
            if (i > 0) os << '*';
            os << '[' << format_double(lower_[i]) << ", " << format_double(upper_[i]) << ']';
        }
    } else {
        os << "ball(";
        for (Eigen::Index i = 0; i < center_.size(); ++i) os << (i ? ", " : "") << format_double(center_[i]);
        os << "; " << format_double(radius_) << ')';
    }
    return os.str();
}

bool operator==(const Domain& a, const Domain& b) {
    return a.shape_ == b.shape_ && a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.radius_ == b.radius_;
}

double SampleRng::normal() {
    // Box-Muller; u1 in (0,1] keeps the log finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Point SampleRng::unit_direction(std::size_t dim) {
    Point u(static_cast<Eigen::Index>(dim));
    if (dim == 1) {
        u[0] = uniform01() < 0.5 ? -1.0 : 1.0;
        return u;
    }
    double n = 0.0;
    do {
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = normal();
        n = u.norm();
    } while (n == 0.0);
    return u / n;
}

Point SampleRng::uniform_in(const Domain& d) {
    if (d.shape() == Domain::Shape::box) {
        Point x(static_cast<Eigen::Index>(d.dim()));
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform(d.lower()[i], d.upper()[i]);
        return x;
    }
    const Point u = unit_direction(d.dim());
    const double r = d.radius() * std::pow(uniform01(), 1.0 / static_cast<double>(d.dim()));
    return d.center() + r * u;
}

Point SampleRng::on_boundary(const Domain& d) {
    if (d.shape() == Domain::Shape::ball) return d.center() + d.radius() * unit_direction(d.dim());
    Point x = uniform_in(d);
    const std::size_t axis = index(d.dim());
    const auto a = static_cast<Eigen::Index>(axis);
    x[a] = uniform01() < 0.5 ? d.lower()[a] : d.upper()[a];
    return x;
}

std::string to_string(SampleStrategy s) {
    switch (s) {
        case SampleStrategy::uniform: return "uniform";
        case SampleStrategy::grid: return "grid";
        case SampleStrategy::near_diagonal: return "near_diagonal";
        case SampleStrategy::boundary: return "boundary";
    }
    return "?";
}

SampleStrategy parse_strategy(const std::string& name) {
    if (name == "uniform") return SampleStrategy::uniform;
    if (name == "grid") return SampleStrategy::grid;
    if (name == "near_diagonal" || name == "near-diagonal" || name == "near") return SampleStrategy::near_diagonal;
    if (name == "boundary") return SampleStrategy::boundary;
    throw PreconditionError("unknown sample strategy '" + name + "'");
}

namespace {

double grid_coordinate(double lo, double hi, std::size_t i, std::size_t n) {
    if (n == 1) return (lo + hi) / 2.0;
    if (i + 1 == n) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

void require_sampleable(const Domain& d, std::size_t count) {
    if (count == 0) throw PreconditionError("sample count must be positive");
    if (!d.has_interior()) throw EmptySample("domain " + d.to_string() + " has zero width; nothing to sample");
}

}  // namespace

std::vector<Point> grid_nodes(const Domain& d, std::size_t nodes_per_axis) {
    require_sampleable(d, nodes_per_axis);
    const std::size_t dim = d.dim();
    std::vector<std::size_t> idx(dim, 0);
    std::vector<Point> nodes;
    Point x(static_cast<Eigen::Index>(dim));
    while (true) {
        for (std::size_t k = 0; k < dim; ++k) {
            const auto a = static_cast<Eigen::Index>(k);
            x[a] = grid_coordinate(d.lower()[a], d.upper()[a], idx[k], nodes_per_axis);
        }
        if (d.contains(x)) nodes.push_back(x);
        std::size_t k = dim;
        while (k > 0) {
            --k;
            if (++idx[k] < nodes_per_axis) break;
            idx[k] = 0;
            if (k == 0) return nodes;
        }
    }
}

PairSample grid_pairs(const Domain& d, std::size_t nodes_per_axis) {
    const std::vector<Point> nodes = grid_nodes(d, nodes_per_axis);
    PairSample out;
    out.strategy = SampleStrategy::grid;
    out.count = nodes_per_axis;
    out.pairs.reserve(nodes.size() * (nodes.size() > 0 ? nodes.size() - 1 : 0));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (i != j) out.pairs.emplace_back(nodes[i], nodes[j]);
        }
    }
    if (out.pairs.empty()) throw EmptySample("grid of " + std::to_string(nodes_per_axis) + " nodes per axis yields no pairs");
    return out;
}

PairSample sample_pairs(const Domain& d, SampleStrategy strategy, std::size_t count, std::uint64_t seed,
                        const SampleOptions& options) {
    require_sampleable(d, count);
    if (strategy == SampleStrategy::grid) {
        PairSample out = grid_pairs(d, count);
        if (out.pairs.size() > count) out.pairs.resize(count);
        out.seed = seed;
        return out;
    }

    PairSample out;
    out.strategy = strategy;
    out.count = count;
    out.seed = seed;
    out.eps_near = options.eps_near;
    out.pairs.reserve(count);
    SampleRng rng(seed);

    // Rejection loops are bounded so a pathological domain fails instead of spinning.
    const std::size_t max_attempts = 1000 * count + 1000;
    std::size_t attempts = 0;
    while (out.pairs.size() < count) {
        if (++attempts > max_attempts) throw EmptySample("could not draw " + std::to_string(count) + " distinct pairs");
        Point x;
        Point y;
        switch (strategy) {
            case SampleStrategy::uniform:
                x = rng.uniform_in(d);
                y = rng.uniform_in(d);
                break;
            case SampleStrategy::near_diagonal: {
                if (!(options.eps_near > 0.0)) throw PreconditionError("eps_near must be positive");
                x = rng.uniform_in(d);
                const double r = options.eps_near * (1.0 - rng.uniform01());
                y = x + r * rng.unit_direction(d.dim());
                if ((x - y).norm() > options.eps_near) continue;
                break;
            }
            case SampleStrategy::boundary:
                x = rng.on_boundary(d);
                y = rng.uniform_in(d);
                if (rng.uniform01() < 0.5) std::swap(x, y);
                break;
            case SampleStrategy::grid:
                break;
        }
        if (!d.contains(x) || !d.contains(y) || x == y) continue;
        out.pairs.emplace_back(std::move(x), std::move(y));
    }
    return out;
}

PointSample sample_points(const Domain& d, std::size_t count, std::uint64_t seed) {
    require_sampleable(d, count);
    PointSample out;
    out.count = count;
    out.seed = seed;
    out.points.reserve(count);
    SampleRng rng(seed);
    while (out.points.size() < count) {
        Point x = rng.uniform_in(d);
        if (d.contains(x)) out.points.push_back(std::move(x));
    }
    return out;
}

}  // namespace contractive
