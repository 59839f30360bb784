#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "contractive/mapdef.hpp"
#include "contractive/space.hpp"

namespace contractive {

/// A deterministic self-map T of a convex domain, evaluated either from a parsed
/// expression or from a built-in callable.
class Mapping {
public:
    using Evaluator = std::function<Point(const Point&)>;

    enum class SelfMapCheck { sample, skip };

    Mapping(std::string label, Domain domain, NormSpec norm, Evaluator evaluator,
            std::optional<Domain> ambient = std::nullopt, SelfMapCheck check = SelfMapCheck::sample);

    static Mapping from_expr(std::string label, mapdef::MapExpr expr, Domain domain, NormSpec norm,
                             std::optional<Domain> ambient = std::nullopt);
    static Mapping from_spec(const mapdef::MapSpec& spec);
    static Mapping from_corpus(const mapdef::CorpusEntry& entry);
    static Mapping from_corpus(std::string_view name);

    Point operator()(const Point& x) const;

    /// ||Tx - x|| in the mapping's norm.
    double residual(const Point& x) const;

    const std::string& label() const noexcept { return label_; }
    const Domain& domain() const noexcept { return domain_; }
    /// Set that images are expected to lie in; the domain unless declared otherwise.
    const Domain& codomain() const noexcept { return ambient_ ? *ambient_ : domain_; }
    const NormSpec& norm() const noexcept { return norm_; }
    std::size_t dim() const noexcept { return domain_.dim(); }
    /// Source expression, when the map was built from one.
    const mapdef::MapExpr* expr() const noexcept { return expr_.get(); }
    /// Self-map violations found by sampling at construction, with witness points.
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    void check_self_map();

    std::string label_;
    Domain domain_;
    std::optional<Domain> ambient_;
    NormSpec norm_;
    Evaluator evaluator_;
    std::shared_ptr<const mapdef::MapExpr> expr_;
    std::vector<std::string> warnings_;
};

/// (1 - lambda) x + lambda Tx, returning Tx itself when lambda == 1.
inline Point average_step(const Point& x, const Point& tx, double lambda) {
    if (lambda == 1.0) return tx;
    return (1.0 - lambda) * x + lambda * tx;
}

/// The averaged map T_lambda = (1 - lambda) I + lambda T, lambda in (0, 1].
class AveragedMapping {
public:
    AveragedMapping(const Mapping& base, double lambda);

    const Mapping& base() const noexcept { return base_; }
    double lambda() const noexcept { return lambda_; }
    /// Enrichment parameter b = 1/lambda - 1.
    double b() const noexcept { return 1.0 / lambda_ - 1.0; }

    Point operator()(const Point& x) const { return average_step(x, base_(x), lambda_); }
    /// T_lambda as a Mapping on the same domain and norm.
    const Mapping& mapping() const noexcept { return averaged_; }

private:
    Mapping base_;
    double lambda_;
    Mapping averaged_;
};

AveragedMapping averaged(const Mapping& T, double lambda);

/// lambda = 1/(b+1).
inline double lambda_from_b(double b) { return 1.0 / (b + 1.0); }
inline double b_from_lambda(double lambda) { return 1.0 / lambda - 1.0; }

struct FixedPointSet {
    std::vector<Point> points;
    double tolerance = 0.0;

    bool empty() const noexcept { return points.empty(); }
    std::size_t size() const noexcept { return points.size(); }
    auto begin() const { return points.begin(); }
    auto end() const { return points.end(); }
};

/// Grid scan of ||Tx - x|| followed by bisection (1-D) or averaged-iteration (n-D) refinement.
/// Every returned point has residual <= tol; detections closer than 10*tol are merged.
FixedPointSet fixed_points(const Mapping& T, std::size_t grid_resolution = 2000, double tol = 1e-8);

}  // namespace contractive
