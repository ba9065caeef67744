#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cta/core.hpp"

namespace cta {

// ============================================================
// Domain types
// ============================================================

/// One OHLCV candle. `ts` is the bar open time (UTC epoch seconds).
struct Bar {
    std::int64_t ts = 0;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    bool valid() const {
        return open > 0.0 && high > 0.0 && low > 0.0 && close > 0.0 &&
               low <= std::min(open, close) && high >= std::max(open, close) &&
               low <= high && volume >= 0.0;
    }
};

/// Immutable after load; timestamps strictly increasing with spacing == interval.
struct CandleSeries {
    std::string symbol;
    std::int64_t interval = 0; // bar duration in seconds
    std::vector<Bar> bars;

    std::size_t size() const { return bars.size(); }
    bool empty() const { return bars.empty(); }

    /// Index of the bar opened at `ts`, or nullopt.
    std::optional<std::size_t> index_of(std::int64_t ts) const {
        if (bars.empty()) return std::nullopt;
        const Bar key{ts};
        auto it = std::lower_bound(bars.begin(), bars.end(), key,
                                   [](const Bar& a, const Bar& b) { return a.ts < b.ts; });
        if (it == bars.end() || it->ts != ts) return std::nullopt;
        return static_cast<std::size_t>(it - bars.begin());
    }
};

/// Sub-bar price event (tick stream for the tactical tier).
struct Tick {
    std::int64_t ts_ms = 0;
    double price = 0.0;
    double qty = 0.0;
};

/// Result of window_at: a view into the series plus a short-history flag.
struct BarWindow {
    std::span<const Bar> bars;
    bool short_window = false; // fewer than requested bars were available

    std::size_t size() const { return bars.size(); }
    const Bar& back() const { return bars.back(); }
    const Bar& operator[](std::size_t i) const { return bars[i]; }
};

namespace detail {

inline void validate_bar(const Bar& b, std::size_t row) {
    if (!(b.open > 0.0 && b.high > 0.0 && b.low > 0.0 && b.close > 0.0))
        throw ValidationError("non-positive price at row " + std::to_string(row));
    if (b.low > std::min(b.open, b.close) || b.high < std::max(b.open, b.close) || b.low > b.high)
        throw ValidationError("OHLC range violated at row " + std::to_string(row));
    if (b.volume < 0.0)
        throw ValidationError("negative volume at row " + std::to_string(row));
}

inline double parse_price_field(const std::string& s, std::size_t row) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\r')) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing junk");
        return round8(v);
    } catch (const std::exception&) {
        throw LoadError("unparseable field '" + s + "' at row " + std::to_string(row));
    }
}

inline std::int64_t parse_ts_field(const std::string& s, std::size_t row) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw LoadError("unparseable timestamp '" + s + "' at row " + std::to_string(row));
    }
}

/// Enforces ordering/spacing; forward-fills gaps when allowed.
inline void append_checked(CandleSeries& out, Bar b, std::size_t row, bool forward_fill) {
    validate_bar(b, row);
    if (!out.bars.empty()) {
        const Bar& prev = out.bars.back();
        if (b.ts <= prev.ts)
            throw OrderingError("non-increasing timestamp at row " + std::to_string(row));
        std::int64_t gap = b.ts - prev.ts;
        if (gap != out.interval) {
            if (gap % out.interval != 0 || !forward_fill)
                throw ValidationError("timestamp gap at row " + std::to_string(row) +
                                      " (expected +" + std::to_string(out.interval) +
                                      "s, got +" + std::to_string(gap) + "s)");
            // fill: o=h=l=c = previous close, zero volume
            for (std::int64_t t = prev.ts + out.interval; t < b.ts; t += out.interval)
                out.bars.push_back(Bar{t, prev.close, prev.close, prev.close, prev.close, 0.0});
        }
    }
    out.bars.push_back(b);
}

} // namespace detail

// ============================================================
// Loading / saving
// ============================================================

/// CSV with header `ts,open,high,low,close,volume`, ts in epoch seconds.
inline CandleSeries load_series_csv(const std::string& path, const std::string& symbol,
                                    std::int64_t interval, bool forward_fill = false) {
    if (interval <= 0) throw ArgumentError("interval must be positive");
    std::ifstream f(path);
    if (!f.is_open()) throw LoadError("cannot open " + path);

    CandleSeries out;
    out.symbol = symbol;
    out.interval = interval;

    std::string line;
    std::size_t row = 0;
    bool header_checked = false;
    while (std::getline(f, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_checked) {
            header_checked = true;
            if (line.rfind("ts,", 0) == 0) continue; // header row
        }
        std::istringstream ss(line);
        std::string fields[6];
        for (int i = 0; i < 6; ++i) {
            if (!std::getline(ss, fields[i], ','))
                throw LoadError("expected 6 fields at row " + std::to_string(row));
        }
        Bar b;
        b.ts = detail::parse_ts_field(fields[0], row);
        b.open = detail::parse_price_field(fields[1], row);
        b.high = detail::parse_price_field(fields[2], row);
        b.low = detail::parse_price_field(fields[3], row);
        b.close = detail::parse_price_field(fields[4], row);
        b.volume = detail::parse_price_field(fields[5], row);
        detail::append_checked(out, b, row, forward_fill);
    }
    return out;
}

/// Exchange-style kline JSON: array of arrays
/// [open_time_ms, "open", "high", "low", "close", "volume", ...].
inline CandleSeries load_series_kline_json(const std::string& path, const std::string& symbol,
                                           std::int64_t interval, bool forward_fill = false) {
    if (interval <= 0) throw ArgumentError("interval must be positive");
    std::ifstream f(path);
    if (!f.is_open()) throw LoadError("cannot open " + path);

    nlohmann::json doc;
    try {
        f >> doc;
    } catch (const std::exception& e) {
        throw LoadError("invalid JSON in " + path + ": " + e.what());
    }
    if (!doc.is_array()) throw LoadError("kline document must be a JSON array");

    CandleSeries out;
    out.symbol = symbol;
    out.interval = interval;

    std::size_t row = 0;
    auto num = [&](const nlohmann::json& v) -> double {
        if (v.is_number()) return round8(v.get<double>());
        if (v.is_string()) return detail::parse_price_field(v.get<std::string>(), row);
        throw LoadError("non-numeric kline field at row " + std::to_string(row));
    };
    for (const auto& k : doc) {
        ++row;
        if (!k.is_array() || k.size() < 6)
            throw LoadError("kline row " + std::to_string(row) + " needs >= 6 entries");
        Bar b;
        std::int64_t t = k[0].is_number_integer() ? k[0].get<std::int64_t>()
                                                  : static_cast<std::int64_t>(num(k[0]));
        b.ts = t >= 100000000000LL ? t / 1000 : t; // ms -> s
        b.open = num(k[1]);
        b.high = num(k[2]);
        b.low = num(k[3]);
        b.close = num(k[4]);
        b.volume = num(k[5]);
        detail::append_checked(out, b, row, forward_fill);
    }
    return out;
}

/// Dispatch by extension: .json -> kline arrays, everything else -> CSV.
inline CandleSeries load_series(const std::string& path, const std::string& symbol,
                                std::int64_t interval, bool forward_fill = false) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".json") return load_series_kline_json(path, symbol, interval, forward_fill);
    return load_series_csv(path, symbol, interval, forward_fill);
}

inline void save_series_csv(const CandleSeries& s, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f.is_open()) throw IoError("cannot write " + path);
    f << "ts,open,high,low,close,volume\n";
    for (const Bar& b : s.bars) {
        f << b.ts << ',' << fmt_fixed(b.open, 8) << ',' << fmt_fixed(b.high, 8) << ','
          << fmt_fixed(b.low, 8) << ',' << fmt_fixed(b.close, 8) << ','
          << fmt_fixed(b.volume, 8) << '\n';
    }
}

/// Ticks as JSONL: {"ts_ms":..., "price":..., "qty":...} per line.
inline std::vector<Tick> load_ticks_jsonl(const std::string& path) {
    std::ifstream f(path);
    if (!f.is_open()) throw LoadError("cannot open " + path);
    std::vector<Tick> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw LoadError("bad tick JSON at row " + std::to_string(row) + ": " + e.what());
        }
        Tick t;
        t.ts_ms = j.at("ts_ms").get<std::int64_t>();
        t.price = j.at("price").get<double>();
        t.qty = j.value("qty", 0.0);
        if (t.price <= 0.0)
            throw ValidationError("non-positive tick price at row " + std::to_string(row));
        if (t.qty < 0.0)
            throw ValidationError("negative tick qty at row " + std::to_string(row));
        if (!out.empty() && t.ts_ms < out.back().ts_ms)
            throw OrderingError("ticks out of order at row " + std::to_string(row));
        out.push_back(t);
    }
    return out;
}

// ============================================================
// Transformations
// ============================================================

/// Aggregate groups of `factor` bars; a trailing partial group is dropped.
inline CandleSeries resample(const CandleSeries& s, std::size_t factor) {
    if (factor == 0) throw ArgumentError("resample factor must be >= 1");
    CandleSeries out;
    out.symbol = s.symbol;
    out.interval = s.interval * static_cast<std::int64_t>(factor);
    std::size_t groups = s.bars.size() / factor;
    out.bars.reserve(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        const Bar* first = &s.bars[g * factor];
        Bar agg;
        agg.ts = first->ts;
        agg.open = first->open;
        agg.close = first[factor - 1].close;
        agg.high = first->high;
        agg.low = first->low;
        agg.volume = 0.0;
        for (std::size_t i = 0; i < factor; ++i) {
            agg.high = std::max(agg.high, first[i].high);
            agg.low = std::min(agg.low, first[i].low);
            agg.volume += first[i].volume;
        }
        out.bars.push_back(agg);
    }
    return out;
}

/// The n bars ending at (and including) the bar opened at `t`.
/// Fewer bars than requested sets the short_window flag.
inline BarWindow window_at(const CandleSeries& s, std::int64_t t, std::size_t n) {
    auto idx = s.index_of(t);
    if (!idx) throw LookupError("no bar opened at ts " + std::to_string(t));
    std::size_t end = *idx + 1;
    std::size_t begin = end >= n ? end - n : 0;
    BarWindow w;
    w.bars = std::span<const Bar>(s.bars.data() + begin, end - begin);
    w.short_window = (end - begin) < n;
    return w;
}

} // namespace cta
