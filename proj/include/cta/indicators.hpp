#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cta/core.hpp"
#include "cta/market_data.hpp"

namespace cta {

// ============================================================
// Indicator snapshot type
// ============================================================

/// All values evaluated at one 15-minute bar timestamp.
/// ema21/ema50/ema200 come from the 1-hour series; the rest from 15-minute.
struct IndicatorSet {
    double ema21 = 0.0;
    double ema50 = 0.0;
    double ema200 = 0.0;
    double rsi14 = 0.0;
    double macd_line = 0.0;
    double macd_signal = 0.0;
    double macd_hist = 0.0;
    double atr14 = 0.0;
    double bb_mid = 0.0;
    double bb_upper = 0.0;
    double bb_lower = 0.0;
    double vwap = 0.0;
    double pdh = 0.0;
    double pdl = 0.0;
};

// ============================================================
// Primitive indicators
// ============================================================

/// Recursive EMA, alpha = 2/(period+1), seeded with the first value.
inline std::vector<double> ema(const std::vector<double>& series, std::size_t period) {
    if (period < 1) throw ArgumentError("ema: period must be >= 1");
    if (series.empty()) throw ArgumentError("ema: empty series");
    const double alpha = 2.0 / (static_cast<double>(period) + 1.0);
    std::vector<double> out(series.size());
    out[0] = series[0];
    for (std::size_t i = 1; i < series.size(); ++i)
        out[i] = alpha * series[i] + (1.0 - alpha) * out[i - 1];
    return out;
}

/// Per-bar true range over the first `count` bars (all by default);
/// TR_0 = high_0 - low_0.
inline std::vector<double> true_range(const CandleSeries& s, std::size_t count = SIZE_MAX) {
    std::size_t n = std::min(count, s.size());
    if (n == 0) throw ArgumentError("true_range: empty series");
    std::vector<double> tr(n);
    tr[0] = s.bars[0].high - s.bars[0].low;
    for (std::size_t i = 1; i < n; ++i) {
        const Bar& b = s.bars[i];
        double pc = s.bars[i - 1].close;
        tr[i] = std::max({b.high - b.low, std::fabs(b.high - pc), std::fabs(b.low - pc)});
    }
    return tr;
}

/// Wilder ATR: running mean of TR until `period` bars exist, then
/// atr_i = (atr_{i-1}*(period-1) + tr_i)/period.
inline std::vector<double> atr(const CandleSeries& s, std::size_t period,
                               std::size_t count = SIZE_MAX) {
    if (period < 1) throw ArgumentError("atr: period must be >= 1");
    std::vector<double> tr = true_range(s, count);
    std::vector<double> out(tr.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (i < period) {
            sum += tr[i];
            out[i] = sum / static_cast<double>(i + 1);
        } else {
            out[i] = (out[i - 1] * static_cast<double>(period - 1) + tr[i]) /
                     static_cast<double>(period);
        }
    }
    return out;
}

/// Wilder RSI. Output index i corresponds to input index i + period.
/// Conventions: avg loss == 0 && avg gain > 0 -> 100; both zero -> 50.
inline std::vector<double> rsi(const std::vector<double>& series, std::size_t period) {
    if (period < 1) throw ArgumentError("rsi: period must be >= 1");
    if (series.size() < period + 1)
        throw ArgumentError("rsi: need at least period+1 prices");
    std::vector<double> out;
    out.reserve(series.size() - period);
    double avg_gain = 0.0, avg_loss = 0.0;
    for (std::size_t i = 1; i <= period; ++i) {
        double d = series[i] - series[i - 1];
        avg_gain += std::max(d, 0.0);
        avg_loss += std::max(-d, 0.0);
    }
    avg_gain /= static_cast<double>(period);
    avg_loss /= static_cast<double>(period);
    auto emit = [&]() {
        if (avg_loss == 0.0 && avg_gain == 0.0) return 50.0;
        if (avg_loss == 0.0) return 100.0;
        double rs = avg_gain / avg_loss;
        return 100.0 - 100.0 / (1.0 + rs);
    };
    out.push_back(emit());
    for (std::size_t i = period + 1; i < series.size(); ++i) {
        double d = series[i] - series[i - 1];
        avg_gain = (avg_gain * static_cast<double>(period - 1) + std::max(d, 0.0)) /
                   static_cast<double>(period);
        avg_loss = (avg_loss * static_cast<double>(period - 1) + std::max(-d, 0.0)) /
                   static_cast<double>(period);
        out.push_back(emit());
    }
    return out;
}

struct MacdResult {
    std::vector<double> line;
    std::vector<double> signal;
    std::vector<double> hist;
};

/// MACD(12,26,9): line = EMA12 - EMA26, signal = EMA9 of line.
inline MacdResult macd(const std::vector<double>& series, std::size_t fast = 12,
                       std::size_t slow = 26, std::size_t signal_period = 9) {
    if (series.empty()) throw ArgumentError("macd: empty series");
    std::vector<double> ef = ema(series, fast);
    std::vector<double> es = ema(series, slow);
    MacdResult r;
    r.line.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) r.line[i] = ef[i] - es[i];
    r.signal = ema(r.line, signal_period);
    r.hist.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) r.hist[i] = r.line[i] - r.signal[i];
    return r;
}

struct BollingerPoint {
    double mid = 0.0;
    double upper = 0.0;
    double lower = 0.0;
};

/// 20-period simple mean +/- `width` sample standard deviations, at the last index.
inline BollingerPoint bollinger_at_end(const std::vector<double>& series, std::size_t period = 20,
                                       double width = 2.0) {
    if (series.size() < period)
        throw WarmupError("bollinger: need " + std::to_string(period) + " prices");
    std::size_t begin = series.size() - period;
    double mean = 0.0;
    for (std::size_t i = begin; i < series.size(); ++i) mean += series[i];
    mean /= static_cast<double>(period);
    double var = 0.0;
    for (std::size_t i = begin; i < series.size(); ++i) {
        double d = series[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(period - 1); // sample variance
    double sd = std::sqrt(var);
    return BollingerPoint{mean, mean + width * sd, mean - width * sd};
}

/// Session (UTC day) anchored VWAP over bars of day(t) up to and including index `at`.
/// Zero cumulative volume falls back to the current bar's typical price.
inline double session_vwap(const CandleSeries& s, std::size_t at) {
    if (at >= s.size()) throw ArgumentError("session_vwap: index out of range");
    std::int64_t day0 = utc_day_open(s.bars[at].ts);
    double pv = 0.0, v = 0.0;
    for (std::size_t i = at + 1; i-- > 0;) {
        if (s.bars[i].ts < day0) break;
        double tp = (s.bars[i].high + s.bars[i].low + s.bars[i].close) / 3.0;
        pv += tp * s.bars[i].volume;
        v += s.bars[i].volume;
    }
    if (v <= 0.0) {
        const Bar& b = s.bars[at];
        return (b.high + b.low + b.close) / 3.0;
    }
    return pv / v;
}

struct DayLevels {
    double pdh = 0.0;
    double pdl = 0.0;
};

/// High/low of the previous complete UTC day relative to the bar at `at`.
inline DayLevels previous_day_levels(const CandleSeries& s, std::size_t at) {
    if (at >= s.size()) throw ArgumentError("previous_day_levels: index out of range");
    std::int64_t day0 = utc_day_open(s.bars[at].ts);
    std::int64_t prev0 = day0 - kSecPerDay;
    double hi = 0.0, lo = 0.0;
    bool seen = false;
    for (std::size_t i = at + 1; i-- > 0;) {
        std::int64_t t = s.bars[i].ts;
        if (t >= day0) continue;
        if (t < prev0) break;
        if (!seen) {
            hi = s.bars[i].high;
            lo = s.bars[i].low;
            seen = true;
        } else {
            hi = std::max(hi, s.bars[i].high);
            lo = std::min(lo, s.bars[i].low);
        }
    }
    if (!seen) throw WarmupError("pdh/pdl: no complete previous UTC day");
    return DayLevels{hi, lo};
}

// ============================================================
// Snapshot assembly
// ============================================================

struct SnapshotOptions {
    std::size_t min_m15_bars = 96;  // >= BB(20), RSI(15), ATR(14); ~1 day
    std::size_t min_h1_bars = 200;  // full EMA200 lookback by default
    std::size_t bb_period = 20;
    double bb_width = 2.0;
};

namespace detail {

inline std::vector<double> closes_of(const CandleSeries& s, std::size_t count_end) {
    std::vector<double> c(count_end);
    for (std::size_t i = 0; i < count_end; ++i) c[i] = s.bars[i].close;
    return c;
}

/// Number of h1 bars whose close time is known once the m15 bar at `t` closes.
inline std::size_t h1_known_count(const CandleSeries& h1, std::int64_t t,
                                  std::int64_t m15_interval) {
    std::size_t n = 0;
    for (const Bar& b : h1.bars) {
        if (b.ts + h1.interval <= t + m15_interval) ++n;
        else break;
    }
    return n;
}

} // namespace detail

/// Evaluate the whole indicator set at 15-minute bar timestamp `t`.
/// Only data complete by the close of that bar is consulted.
inline IndicatorSet indicator_snapshot(const CandleSeries& m15, const CandleSeries& h1,
                                       std::int64_t t, const SnapshotOptions& opt = {}) {
    auto idx15 = m15.index_of(t);
    if (!idx15) throw LookupError("indicator_snapshot: ts not in 15m series");
    std::size_t n15 = *idx15 + 1;
    if (n15 < opt.min_m15_bars)
        throw WarmupError("indicator_snapshot: 15m history (" + std::to_string(n15) +
                          " bars) below minimum " + std::to_string(opt.min_m15_bars));
    std::size_t n1h = detail::h1_known_count(h1, t, m15.interval);
    if (n1h < opt.min_h1_bars)
        throw WarmupError("indicator_snapshot: ema200 1h history (" + std::to_string(n1h) +
                          " bars) below minimum " + std::to_string(opt.min_h1_bars));

    std::vector<double> c15 = detail::closes_of(m15, n15);
    std::vector<double> c1h = detail::closes_of(h1, n1h);

    IndicatorSet out;
    out.ema21 = ema(c1h, 21).back();
    out.ema50 = ema(c1h, 50).back();
    out.ema200 = ema(c1h, 200).back();
    out.rsi14 = rsi(c15, 14).back();

    MacdResult m = macd(c15);
    out.macd_line = m.line.back();
    out.macd_signal = m.signal.back();
    out.macd_hist = m.hist.back();

    out.atr14 = atr(m15, 14, n15).back();

    BollingerPoint bb = bollinger_at_end(c15, opt.bb_period, opt.bb_width);
    out.bb_mid = bb.mid;
    out.bb_upper = bb.upper;
    out.bb_lower = bb.lower;

    out.vwap = session_vwap(m15, n15 - 1);
    DayLevels dl = previous_day_levels(m15, n15 - 1);
    out.pdh = dl.pdh;
    out.pdl = dl.pdl;
    return out;
}

/// Deterministic one-line-per-field rendering used in evidence documents
/// and prompt construction.
inline std::string render_indicators(const IndicatorSet& ind) {
    std::string s;
    s += "ema21=" + fmt_fixed(ind.ema21, 6);
    s += " ema50=" + fmt_fixed(ind.ema50, 6);
    s += " ema200=" + fmt_fixed(ind.ema200, 6);
    s += " rsi14=" + fmt_fixed(ind.rsi14, 4);
    s += " macd=" + fmt_fixed(ind.macd_line, 6);
    s += " macd_sig=" + fmt_fixed(ind.macd_signal, 6);
    s += " macd_hist=" + fmt_fixed(ind.macd_hist, 6);
    s += " atr14=" + fmt_fixed(ind.atr14, 6);
    s += " bb=[" + fmt_fixed(ind.bb_lower, 6) + "," + fmt_fixed(ind.bb_mid, 6) + "," +
         fmt_fixed(ind.bb_upper, 6) + "]";
    s += " vwap=" + fmt_fixed(ind.vwap, 6);
    s += " pdh=" + fmt_fixed(ind.pdh, 6);
    s += " pdl=" + fmt_fixed(ind.pdl, 6);
    return s;
}

} // namespace cta
