#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cta/core.hpp"
#include "cta/indicators.hpp"
#include "cta/market_data.hpp"

namespace cta {

// ============================================================
// Regime types
// ============================================================

enum class RegimeLabel { RISK_ON, RISK_OFF, NEUTRAL };
enum class VolState { LOW, NORMAL, HIGH };
enum class LiquidityState { DEEP, THIN };

inline const char* to_string(RegimeLabel v) {
    switch (v) {
        case RegimeLabel::RISK_ON: return "RISK_ON";
        case RegimeLabel::RISK_OFF: return "RISK_OFF";
        default: return "NEUTRAL";
    }
}
inline const char* to_string(VolState v) {
    switch (v) {
        case VolState::LOW: return "LOW";
        case VolState::HIGH: return "HIGH";
        default: return "NORMAL";
    }
}
inline const char* to_string(LiquidityState v) {
    return v == LiquidityState::THIN ? "THIN" : "DEEP";
}

inline RegimeLabel regime_label_from_string(const std::string& s) {
    if (s == "RISK_ON") return RegimeLabel::RISK_ON;
    if (s == "RISK_OFF") return RegimeLabel::RISK_OFF;
    if (s == "NEUTRAL") return RegimeLabel::NEUTRAL;
    throw ValidationError("unknown regime label '" + s + "'");
}
inline VolState vol_state_from_string(const std::string& s) {
    if (s == "LOW") return VolState::LOW;
    if (s == "NORMAL") return VolState::NORMAL;
    if (s == "HIGH") return VolState::HIGH;
    throw ValidationError("unknown volatility state '" + s + "'");
}

struct RegimeSnapshot {
    RegimeLabel label = RegimeLabel::NEUTRAL;
    VolState volatility_state = VolState::NORMAL;
    double macro_sentiment = 0.0; // [-1, 1]
    LiquidityState liquidity_state = LiquidityState::DEEP;
};

inline std::string render_regime(const RegimeSnapshot& r) {
    std::string s;
    s += "regime=";
    s += to_string(r.label);
    s += " vol=";
    s += to_string(r.volatility_state);
    s += " sentiment=" + fmt_fixed(r.macro_sentiment, 4);
    s += " liquidity=";
    s += to_string(r.liquidity_state);
    return s;
}

/// Per-regime control parameters consumed by hysteresis, gating and sizing.
struct RegimeThresholds {
    double theta_adopt = 0.0;
    double theta_hold = 0.0;
    double theta_exec = 0.0;
    double stop_atr_multiple = 0.0;
    double size_scalar = 0.0;
};

// ============================================================
// Classification
// ============================================================

struct RegimeParams {
    std::int64_t vol_window_s = 30 * kSecPerDay; // trailing window for the ATR percentile
    double low_pct = 30.0;                       // below -> LOW
    double high_pct = 70.0;                      // above -> HIGH
    double thin_volume_ratio = 0.4;              // session volume vs same-hour median
    std::size_t min_h1_bars = 48;                // insufficient history -> warm-up error
    double risk_off_sentiment = -0.3;
};

namespace detail {

/// Percent of window values strictly below x.
inline double percentile_rank(const std::vector<double>& window, double x) {
    if (window.empty()) return 0.0;
    std::size_t below = 0;
    for (double v : window)
        if (v < x) ++below;
    return 100.0 * static_cast<double>(below) / static_cast<double>(window.size());
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Deterministic rule-table classification.
///   volatility: percentile of atr14/close (1h) within the trailing window
///   label:      EMA stack + sentiment + volatility
///   liquidity:  last complete 1h volume vs trailing same-hour median
/// `h1` must contain only bars complete at evaluation time.
inline RegimeSnapshot classify_regime(const IndicatorSet& ind, const CandleSeries& h1,
                                      double evidence_sentiment, const RegimeParams& p = {}) {
    if (h1.size() < p.min_h1_bars || h1.size() < 15)
        throw WarmupError("classify_regime: 1h history (" + std::to_string(h1.size()) +
                          " bars) below minimum " + std::to_string(p.min_h1_bars));

    RegimeSnapshot out;
    out.macro_sentiment = std::clamp(evidence_sentiment, -1.0, 1.0);

    // Volatility state from the ATR/close ratio on the 1h series.
    std::vector<double> a = atr(h1, 14);
    std::int64_t now = h1.bars.back().ts;
    std::vector<double> window;
    window.reserve(h1.size());
    for (std::size_t i = 0; i < h1.size(); ++i) {
        if (h1.bars[i].ts >= now - p.vol_window_s)
            window.push_back(a[i] / h1.bars[i].close);
    }
    double current = a.back() / h1.bars.back().close;
    double pct = detail::percentile_rank(window, current);
    out.volatility_state = pct < p.low_pct    ? VolState::LOW
                           : pct > p.high_pct ? VolState::HIGH
                                              : VolState::NORMAL;

    // Directional label from the EMA stack.
    bool stack_up = ind.ema21 > ind.ema50 && ind.ema50 > ind.ema200;
    bool stack_down = ind.ema21 < ind.ema50;
    if (stack_up && out.macro_sentiment >= 0.0 && out.volatility_state != VolState::HIGH)
        out.label = RegimeLabel::RISK_ON;
    else if (stack_down && (out.macro_sentiment < p.risk_off_sentiment ||
                            out.volatility_state == VolState::HIGH))
        out.label = RegimeLabel::RISK_OFF;
    else
        out.label = RegimeLabel::NEUTRAL;

    // Liquidity: last complete hour's volume vs same-hour-of-day median.
    const Bar& last = h1.bars.back();
    int hour = utc_hour_of_day(last.ts);
    std::vector<double> same_hour;
    for (std::size_t i = 0; i + 1 < h1.size(); ++i) {
        const Bar& b = h1.bars[i];
        if (b.ts >= last.ts - p.vol_window_s && utc_hour_of_day(b.ts) == hour)
            same_hour.push_back(b.volume);
    }
    if (same_hour.empty())
        throw WarmupError("classify_regime: no trailing same-hour volume history");
    out.liquidity_state = last.volume < p.thin_volume_ratio * detail::median(same_hour)
                              ? LiquidityState::THIN
                              : LiquidityState::DEEP;
    return out;
}

// ============================================================
// Threshold table
// ============================================================

struct ThresholdTable {
    // indexed [label][vol_state]
    std::array<std::array<RegimeThresholds, 3>, 3> rows{};

    RegimeThresholds& at(RegimeLabel l, VolState v) {
        return rows[static_cast<std::size_t>(l)][static_cast<std::size_t>(v)];
    }
    const RegimeThresholds& at(RegimeLabel l, VolState v) const {
        return rows[static_cast<std::size_t>(l)][static_cast<std::size_t>(v)];
    }

    /// Every row must satisfy the threshold invariants; call at startup.
    void validate() const {
        static const RegimeLabel labels[] = {RegimeLabel::RISK_ON, RegimeLabel::RISK_OFF,
                                             RegimeLabel::NEUTRAL};
        static const VolState vols[] = {VolState::LOW, VolState::NORMAL, VolState::HIGH};
        for (RegimeLabel l : labels) {
            for (VolState v : vols) {
                const RegimeThresholds& t = at(l, v);
                std::string where = std::string(to_string(l)) + "/" + to_string(v);
                if (!(t.theta_adopt > 0.0 && t.theta_adopt < 1.0) ||
                    !(t.theta_hold > 0.0 && t.theta_hold < 1.0) ||
                    !(t.theta_exec > 0.0 && t.theta_exec < 1.0))
                    throw ConfigError("thresholds " + where + ": theta values must lie in (0,1)");
                if (!(t.theta_adopt > t.theta_hold))
                    throw ConfigError("thresholds " + where + ": theta_adopt must exceed theta_hold");
                if (!(t.theta_exec >= t.theta_hold))
                    throw ConfigError("thresholds " + where + ": theta_exec must be >= theta_hold");
                if (!(t.stop_atr_multiple > 0.0))
                    throw ConfigError("thresholds " + where + ": stop_atr_multiple must be positive");
                if (!(t.size_scalar > 0.0 && t.size_scalar <= 1.0))
                    throw ConfigError("thresholds " + where + ": size_scalar must lie in (0,1]");
            }
        }
    }
};

/// Shipped defaults. Magnitudes are conventions; the orderings are the contract:
/// wider stops and smaller size in RISK_OFF/high-vol than in calm RISK_ON.
inline ThresholdTable default_threshold_table() {
    ThresholdTable t;
    auto set = [&t](RegimeLabel l, VolState v, double adopt, double hold, double exec,
                    double stop, double size) {
        t.at(l, v) = RegimeThresholds{adopt, hold, exec, stop, size};
    };
    set(RegimeLabel::RISK_ON, VolState::LOW, 0.58, 0.38, 0.52, 1.5, 1.0);
    set(RegimeLabel::RISK_ON, VolState::NORMAL, 0.60, 0.40, 0.55, 1.5, 1.0);
    set(RegimeLabel::RISK_ON, VolState::HIGH, 0.70, 0.50, 0.65, 2.5, 0.5);
    set(RegimeLabel::NEUTRAL, VolState::LOW, 0.62, 0.42, 0.57, 1.8, 0.8);
    set(RegimeLabel::NEUTRAL, VolState::NORMAL, 0.65, 0.45, 0.60, 2.0, 0.7);
    set(RegimeLabel::NEUTRAL, VolState::HIGH, 0.72, 0.52, 0.68, 2.5, 0.5);
    set(RegimeLabel::RISK_OFF, VolState::LOW, 0.70, 0.50, 0.66, 2.2, 0.5);
    set(RegimeLabel::RISK_OFF, VolState::NORMAL, 0.72, 0.52, 0.68, 2.5, 0.45);
    set(RegimeLabel::RISK_OFF, VolState::HIGH, 0.75, 0.55, 0.70, 2.5, 0.4);
    return t;
}

/// Pure lookup; the table was validated at startup.
inline RegimeThresholds thresholds_for(const RegimeSnapshot& r, const ThresholdTable& table) {
    return table.at(r.label, r.volatility_state);
}

} // namespace cta
