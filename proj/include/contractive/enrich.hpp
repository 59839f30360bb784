#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contractive/classify.hpp"
#include "contractive/mapping.hpp"

namespace contractive {

/// {0.01, 0.02, ..., 0.99, 1.0}.
const std::vector<double>& default_lambda_grid();

struct ProfileEntry {
    double lambda = 1.0;
    Certificate certificate;
};

struct EnrichmentBest {
    double lambda = 1.0;
    double b = 0.0;
    Constants constants;
};

enum class EnrichmentVerdict { enrichable, not_enriched_on_grid };
std::string to_string(EnrichmentVerdict v);

struct EnrichmentResult {
    ClassKind base_kind = ClassKind::banach;
    std::vector<ProfileEntry> profile;
    /// Entries from the local refinement around the best grid entry; not part of the profile.
    std::vector<ProfileEntry> refined;
    std::optional<EnrichmentBest> best;
    EnrichmentVerdict verdict = EnrichmentVerdict::not_enriched_on_grid;
    /// CRR and quasi contraction scans gather evidence only.
    bool probe = false;
    std::vector<std::string> notes;
};

struct ScanOptions {
    bool refine = true;
    bool allow_probe = true;
};

/// Certificate of T_lambda for every lambda in the grid, best member entry by class constant.
EnrichmentResult enriched_scan(const Mapping& T, ClassKind base_kind, const std::vector<double>& lambda_grid,
                               const PairSample& pairs, const ScanOptions& options = {});

/// Both sides of the b-parameterized enriched inequality written directly in terms of T.
/// Constants: banach theta (or c of T_lambda), kannan a, chatterjea b, almost theta (or delta) and L.
std::pair<double, double> direct_enriched_residual(const Mapping& T, ClassKind base_kind, double b, const Point& x,
                                                   const Point& y, const Constants& constants = {});

enum class SaturationKind { spc_vs_enriched_ne, demi_vs_enriched_qne };
std::string to_string(SaturationKind k);

struct SaturationReport {
    SaturationKind kind = SaturationKind::spc_vs_enriched_ne;
    double k = 0.0;
    double b = 0.0;
    double per_pair_agreement = 0.0;
    double max_identity_residual = 0.0;
    std::size_t pairs = 0;
    std::size_t both_hold = 0;
    std::size_t both_fail = 0;
    std::size_t disagree = 0;
};

SaturationReport spc_saturation_check(const Mapping& T, double k, const PairSample& pairs);
SaturationReport demi_saturation_check(const Mapping& T, double k, const FixedPointSet& fix, const PointSample& points);

}  // namespace contractive
