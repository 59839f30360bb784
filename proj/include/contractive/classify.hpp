#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contractive/mapping.hpp"
#include "contractive/space.hpp"

namespace contractive {

enum class ClassKind {
    banach,
    kannan,
    chatterjea,
    zamfirescu,
    almost,
    ciric_quasi,
    crr,
    nonexpansive,
    quasi_nonexpansive,
    strict_pseudo,
    demicontractive,
};

std::string to_string(ClassKind kind);
ClassKind parse_class_kind(const std::string& name);
/// Kinds whose condition quantifies over (x, y*) with y* a fixed point.
bool uses_fixed_points(ClassKind kind);
/// Kinds whose condition is built from inner products.
bool needs_inner_product(ClassKind kind);

enum class Verdict { member_empirical, non_member_witnessed };
std::string to_string(Verdict v);

/// Ordered named constants (c, a, b, delta, L, h, k, ...).
using Constants = std::map<std::string, double>;

/// A sampled pair together with both sides of the class inequality, evaluated at the
/// admissibility threshold.
struct Witness {
    Point x;
    Point y;
    double lhs = 0.0;
    double rhs = 0.0;
    double required = 0.0;
};

struct SampleInfo {
    SampleStrategy strategy = SampleStrategy::uniform;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::size_t evaluated = 0;
};

/// One entry of a parameter scan inside a certificate (L for almost contractions, b for CRR).
struct ScanEntry {
    double parameter = 0.0;
    double constant = 0.0;
};

struct Certificate {
    ClassKind kind = ClassKind::banach;
    Constants constants;
    Verdict verdict = Verdict::member_empirical;
    std::optional<Witness> witness;
    SampleInfo sample;
    double threshold = 1.0;
    std::string threshold_text;
    std::vector<ScanEntry> scan;
    std::vector<std::string> notes;

    bool member() const noexcept { return verdict == Verdict::member_empirical; }
    /// The constant the class bounds: c, a, b, delta, h, k, or a + 2b for CRR.
    double primary_constant() const;
};

/// Parameters for kinds that take them when evaluated pair by pair.
struct ClassParams {
    double almost_L = 0.0;
    double crr_b = 0.0;
};

/// Required constant for a single ordered pair; +inf when no constant works, 0 when unconstrained.
/// For fixed-point kinds the pair is (x, y*).
double required_constant(ClassKind kind, const Mapping& T, const Point& x, const Point& y, const ClassParams& params = {});

/// Both sides of the class inequality at the pair with the constant set to `constant`.
std::pair<double, double> inequality_sides(ClassKind kind, const Mapping& T, const Point& x, const Point& y, double constant,
                                           const ClassParams& params = {});

/// Supremum of required constants over the sample, with a witness when the supremum reaches the threshold.
Certificate estimate_class(ClassKind kind, const Mapping& T, const PairSample& pairs,
                           const std::optional<FixedPointSet>& fix = std::nullopt, const ClassParams& params = {});

/// Fixed-point kinds over a point sample; every point is paired with every y* in `fix`.
Certificate estimate_class(ClassKind kind, const Mapping& T, const PointSample& points, const FixedPointSet& fix);

struct ZamfirescuParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

Certificate check_zamfirescu(const Mapping& T, const ZamfirescuParams& params, const PairSample& pairs);

const std::vector<double>& default_L_grid();
const std::vector<double>& default_crr_b_grid();

Certificate estimate_almost(const Mapping& T, const PairSample& pairs, const std::vector<double>& L_grid = default_L_grid());
Certificate estimate_crr(const Mapping& T, const PairSample& pairs, const std::vector<double>& b_grid = default_crr_b_grid());

}  // namespace contractive
