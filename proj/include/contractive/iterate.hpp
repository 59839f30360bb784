#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "contractive/classify.hpp"
#include "contractive/mapping.hpp"

namespace contractive {

struct IterationConfig {
    double lambda = 1.0;
    Point x0;
    std::size_t max_iters = 1000;
    /// Stop at the first step norm ||x_{n+1} - x_n|| below this.
    double stop_tol = 1e-10;
};

struct TraceRow {
    std::size_t n = 0;
    Point x;
    /// ||x_n - x_{n-1}||; absent at n = 0.
    std::optional<double> step;
    /// ||T x_n - x_n||; NaN when x_n left the domain and T could not be evaluated there.
    double residual = 0.0;
};

enum class Termination { tolerance, max_iters, left_domain };
std::string to_string(Termination t);

struct IterationTrace {
    std::vector<TraceRow> rows;
    Termination terminated_by = Termination::max_iters;
    double lambda = 1.0;
    double stop_tol = 0.0;

    const Point& final_point() const { return rows.back().x; }
    bool converged() const noexcept { return terminated_by == Termination::tolerance; }
};

/// x_{n+1} = (1 - lambda) x_n + lambda T x_n; lambda = 1 is the Picard iteration.
IterationTrace krasnoselskij(const Mapping& T, const IterationConfig& cfg);

/// Which a-priori estimate a constant set feeds.
enum class BoundKind { banach, enriched_banach, kannan, chatterjea, almost, enriched_almost };
std::string to_string(BoundKind k);
BoundKind parse_bound_kind(const std::string& name);

/// banach: c; enriched_banach: theta/(b+1); kannan: a/(1-a); chatterjea: b/(1-b);
/// almost: delta; enriched_almost: theta/(b+1). Result lies in [0, 1).
double delta_for(BoundKind kind, const Constants& constants);
/// delta_for applied to a member certificate of banach, kannan, chatterjea or almost kind.
double delta_for(const Certificate& cert);

struct BoundEntry {
    std::size_t n = 0;
    std::size_t i = 0;
    double bound = 0.0;
    double actual = 0.0;
    bool ok = true;
};

struct ErrorBoundReport {
    double delta = 0.0;
    Point limit;
    std::vector<BoundEntry> entries;
    /// max(actual - bound) over all entries.
    double max_violation = 0.0;
    bool all_ok = true;
};

struct BoundOptions {
    /// Checks i up to the end of the trace instead of 10.
    bool full_range = false;
    double slack = 1e-9;
};

/// ||x_{n+i-1} - p|| against delta^i/(1-delta) ||x_n - x_{n-1}|| for n >= 1.
/// The limit must satisfy ||Tp - p|| <= 10 stop_tol.
ErrorBoundReport apriori_bounds(const Mapping& T, const IterationTrace& trace, double delta, const Point& limit,
                                const BoundOptions& options = {});

struct ConvergenceReport {
    enum class Status { converged, inconclusive };
    Status status = Status::inconclusive;
    std::optional<Point> limit;
    double terminal_distance = std::numeric_limits<double>::quiet_NaN();
    /// Geometric mean of consecutive step-norm ratios over the last 10 steps; NaN if unavailable.
    double observed_ratio = std::numeric_limits<double>::quiet_NaN();
    std::string message;
};
std::string to_string(ConvergenceReport::Status s);

ConvergenceReport convergence_report(const IterationTrace& trace, const FixedPointSet& fix);

void write_trace_csv(std::ostream& out, const IterationTrace& trace);
void write_bounds_csv(std::ostream& out, const ErrorBoundReport& report);

}  // namespace contractive
