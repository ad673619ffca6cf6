#include "morphlex/curve.hpp"

#include "morphlex/errors.hpp"
#include "morphlex/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace morphlex {

void IpsCurve::validate(std::size_t min_points) const {
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].k <= points[i - 1].k) {
            throw ConfigError("curve k values must be strictly increasing");
        }
    }
    if (points.size() < min_points) {
        throw DegenerateDataError("curve has " + std::to_string(points.size()) + " points, need at least " +
                                  std::to_string(min_points));
    }
}

KneedleResult kneedle_elbow(const IpsCurve& curve, double sensitivity) {
    curve.validate(3);
    const auto& pts = curve.points;
    const std::size_t n = pts.size();

    KneedleResult result;
    result.increasing_overall = pts.back().ips > pts.front().ips;

    double y_min = pts[0].ips, y_max = pts[0].ips;
    for (const auto& p : pts) {
        y_min = std::min(y_min, p.ips);
        y_max = std::max(y_max, p.ips);
    }
    const double x_lo = static_cast<double>(pts.front().k);
    const double x_range = static_cast<double>(pts.back().k) - x_lo;
    const double y_range = y_max - y_min;

    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xn = (static_cast<double>(pts[i].k) - x_lo) / x_range;
        const double yn = y_range > 0.0 ? (pts[i].ips - y_min) / y_range : 0.0;
        d[i] = yn - xn;
    }

    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i] > d[i - 1] && d[i] >= d[i + 1]) maxima.push_back(i);
    }

    const double drop = sensitivity / static_cast<double>(n - 1); // S * mean normalized spacing
    for (std::size_t m = 0; m < maxima.size(); ++m) {
        const std::size_t i = maxima[m];
        const double threshold = d[i] - drop;
        const std::size_t next = m + 1 < maxima.size() ? maxima[m + 1] : n;
        for (std::size_t j = i + 1; j < next; ++j) {
            if (d[j] < threshold) {
                result.k = pts[i].k;
                result.distinct_knee = true;
                return result;
            }
        }
    }

    // no qualifying local maximum: fall back to the global maximum of d
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (d[i] > d[best]) best = i;
    }
    result.k = pts[best].k;
    result.distinct_knee = false;
    return result;
}

int64_t q90_point(const IpsCurve& curve) {
    curve.validate(1);
    double max_ips = curve.points.front().ips;
    for (const auto& p : curve.points) max_ips = std::max(max_ips, p.ips);
    for (const auto& p : curve.points) {
        if (p.ips >= 0.9 * max_ips) return p.k;
    }
    return curve.points.back().k; // unreachable: the max itself qualifies
}

int64_t max_gain_point(const IpsCurve& curve, GainMode mode) {
    curve.validate(2);
    const auto& pts = curve.points;
    int64_t best_k = pts[1].k;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double gain = pts[i].ips - pts[i - 1].ips;
        if (mode == GainMode::PerUnitDelta) gain /= static_cast<double>(pts[i].k - pts[i - 1].k);
        if (gain > best_gain) {
            best_gain = gain;
            best_k = pts[i].k;
        }
    }
    return best_k;
}

CurveAnalysis recommend_range(const IpsCurve& curve, double sensitivity, GainMode gain_mode) {
    const auto elbow = kneedle_elbow(curve, sensitivity);
    CurveAnalysis analysis;
    analysis.k_elbow = elbow.k;
    analysis.distinct_knee = elbow.distinct_knee;
    analysis.increasing_overall = elbow.increasing_overall;
    analysis.k_q90 = q90_point(curve);
    analysis.k_gain = max_gain_point(curve, gain_mode);
    analysis.gain_mode = gain_mode;
    analysis.sensitivity = sensitivity;
    analysis.recommended_range = {analysis.k_elbow, analysis.k_q90};
    analysis.degenerate_range = analysis.k_elbow > analysis.k_q90;
    return analysis;
}

IpsCurve load_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    IpsCurve curve;
    std::string line;
    std::size_t lineno = 0;
    enum class Format { KIps, KLmcOsr, KLmcOsrIps } format = Format::KIps;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
            if (line == "k,ips") {
                format = Format::KIps;
            } else if (line == "k,lmc,osr") {
                format = Format::KLmcOsr;
            } else if (line == "k,lmc,osr,ips") {
                format = Format::KLmcOsrIps;
            } else {
                throw IoError(path.string() + ":1: expected header \"k,ips\", \"k,lmc,osr\" or \"k,lmc,osr,ips\"");
            }
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        const std::size_t expected = format == Format::KIps ? 2 : format == Format::KLmcOsr ? 3 : 4;
        if (cells.size() != expected) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(expected) +
                          " columns, got " + std::to_string(cells.size()));
        }
        IpsPoint p;
        try {
            p.k = std::stoll(cells[0]);
            if (format == Format::KIps) {
                p.ips = std::stod(cells[1]);
            } else if (format == Format::KLmcOsr) {
                p.ips = integrated_performance_score(std::stod(cells[1]), std::stod(cells[2]));
            } else {
                p.ips = std::stod(cells[3]);
            }
        } catch (const ConfigError&) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": lmc/osr out of range [0, 1]");
        } catch (const std::exception&) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
        }
        curve.points.push_back(p);
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    curve.validate(1);
    return curve;
}

std::string gain_mode_name(GainMode mode) {
    return mode == GainMode::AbsoluteDelta ? "absolute" : "per-unit";
}

GainMode gain_mode_from_name(const std::string& name) {
    if (name == "absolute") return GainMode::AbsoluteDelta;
    if (name == "per-unit") return GainMode::PerUnitDelta;
    throw ConfigError("unknown gain mode \"" + name + "\" (use absolute or per-unit)");
}

} // namespace morphlex
