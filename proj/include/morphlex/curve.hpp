#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace morphlex {

struct IpsPoint {
    int64_t k = 0;
    double ips = 0.0;
};

// IPS samples over a vocabulary-size grid, strictly increasing in k.
struct IpsCurve {
    std::vector<IpsPoint> points;

    // Throws ConfigError unless k is strictly increasing; DegenerateDataError
    // when fewer than min_points remain.
    void validate(std::size_t min_points = 1) const;
};

struct KneedleResult {
    int64_t k = 0;
    bool distinct_knee = true;      // false when the fallback fired
    bool increasing_overall = true; // precondition check, for warnings
};

// Kneedle for a concave increasing curve on the raw grid: min-max normalize
// both axes, take d_i = y_i - x_i, and return the first local maximum of d
// that passes the sensitivity test (drop of S / (n-1) before the next local
// maximum). Falls back to the global maximum of d.
KneedleResult kneedle_elbow(const IpsCurve& curve, double sensitivity = 1.0);

// Smallest grid k reaching 90% of the maximum observed IPS.
int64_t q90_point(const IpsCurve& curve);

enum class GainMode { AbsoluteDelta, PerUnitDelta };

// Upper endpoint of the interval with the largest IPS gain (optionally per
// unit of k); ties go to the smaller k.
int64_t max_gain_point(const IpsCurve& curve, GainMode mode = GainMode::AbsoluteDelta);

struct CurveAnalysis {
    int64_t k_elbow = 0;
    int64_t k_q90 = 0;
    int64_t k_gain = 0;
    std::pair<int64_t, int64_t> recommended_range{0, 0};
    bool degenerate_range = false; // k_elbow > k_q90
    bool distinct_knee = true;
    bool increasing_overall = true;
    GainMode gain_mode = GainMode::AbsoluteDelta;
    double sensitivity = 1.0;
};

CurveAnalysis recommend_range(const IpsCurve& curve, double sensitivity = 1.0,
                              GainMode gain_mode = GainMode::AbsoluteDelta);

// Accepts "k,ips", "k,lmc,osr" (IPS computed on load) and "k,lmc,osr,ips"
// headers. Parse errors carry line numbers.
IpsCurve load_curve_csv(const std::filesystem::path& path);

std::string gain_mode_name(GainMode mode);
GainMode gain_mode_from_name(const std::string& name);

} // namespace morphlex
