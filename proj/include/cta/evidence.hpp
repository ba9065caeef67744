#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cta/core.hpp"
#include "cta/indicators.hpp"
#include "cta/regime.hpp"

namespace cta {

// ============================================================
// Types
// ============================================================

enum class EvidenceSource { NEWS, SOCIAL };

inline const char* to_string(EvidenceSource s) {
    return s == EvidenceSource::NEWS ? "NEWS" : "SOCIAL";
}

struct EvidenceItem {
    std::int64_t ts = 0;
    EvidenceSource source = EvidenceSource::NEWS;
    std::string text;
    std::optional<double> sentiment; // [-1, 1] when present
};

/// Unified evidence document handed to the strategist at each epoch.
struct EvidenceDocument {
    std::int64_t as_of = 0;
    std::vector<EvidenceItem> items; // newest first, capped
    double aggregate_sentiment = 0.0;
    std::string market_summary;
};

struct FeedLoadResult {
    std::vector<EvidenceItem> items;
    std::size_t skipped = 0; // malformed lines
};

// ============================================================
// Ingestion
// ============================================================

/// JSONL feed: {"ts":..., "source":"NEWS"|"SOCIAL", "text":"...", "sentiment":...}
/// (sentiment optional). Malformed lines are counted and skipped.
inline FeedLoadResult ingest_feed(const std::string& path) {
    std::ifstream f(path);
    if (!f.is_open()) throw LoadError("cannot open " + path);

    FeedLoadResult out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            EvidenceItem item;
            item.ts = j.at("ts").get<std::int64_t>();
            if (item.ts <= 0) throw ValidationError("ts must be positive");
            std::string src = j.at("source").get<std::string>();
            if (src == "NEWS") item.source = EvidenceSource::NEWS;
            else if (src == "SOCIAL") item.source = EvidenceSource::SOCIAL;
            else throw ValidationError("bad source");
            item.text = j.at("text").get<std::string>();
            if (j.contains("sentiment") && !j["sentiment"].is_null()) {
                double s = j["sentiment"].get<double>();
                if (s < -1.0 || s > 1.0) throw ValidationError("sentiment out of range");
                item.sentiment = s;
            }
            out.items.push_back(std::move(item));
        } catch (const std::exception&) {
            ++out.skipped;
        }
    }
    std::stable_sort(out.items.begin(), out.items.end(),
                     [](const EvidenceItem& a, const EvidenceItem& b) { return a.ts < b.ts; });
    return out;
}

// ============================================================
// Document assembly
// ============================================================

/// Recency-weighted mean of the present sentiments, weight exp(-dt/lookback).
/// Items outside (as_of - lookback, as_of] are ignored; no scored items -> 0.
inline double aggregate_sentiment(const std::vector<EvidenceItem>& items, std::int64_t as_of,
                                  std::int64_t lookback_s) {
    double num = 0.0, den = 0.0;
    for (const EvidenceItem& it : items) {
        if (it.ts > as_of || it.ts <= as_of - lookback_s || !it.sentiment) continue;
        double w = std::exp(-static_cast<double>(as_of - it.ts) /
                            static_cast<double>(lookback_s));
        num += w * *it.sentiment;
        den += w;
    }
    return den > 0.0 ? num / den : 0.0;
}

/// Filter to the lookback window, keep the newest `cap` items, render the
/// market summary. Deterministic: identical inputs give byte-identical output.
inline EvidenceDocument build_evidence(const std::vector<EvidenceItem>& items, std::int64_t as_of,
                                       const IndicatorSet& ind, const RegimeSnapshot& regime,
                                       std::size_t cap, std::int64_t lookback_s) {
    EvidenceDocument doc;
    doc.as_of = as_of;
    doc.aggregate_sentiment = aggregate_sentiment(items, as_of, lookback_s);

    std::vector<EvidenceItem> in_window;
    for (const EvidenceItem& it : items) {
        if (it.ts > as_of || it.ts <= as_of - lookback_s) continue;
        in_window.push_back(it);
    }
    // newest first; break timestamp ties deterministically
    std::sort(in_window.begin(), in_window.end(), [](const EvidenceItem& a, const EvidenceItem& b) {
        if (a.ts != b.ts) return a.ts > b.ts;
        if (a.text != b.text) return a.text < b.text;
        return static_cast<int>(a.source) < static_cast<int>(b.source);
    });
    if (in_window.size() > cap) in_window.resize(cap);
    doc.items = std::move(in_window);

    doc.market_summary = "as_of=" + std::to_string(as_of) + "\n" + render_indicators(ind) + "\n" +
                         render_regime(regime) + "\nagg_sentiment=" +
                         fmt_fixed(doc.aggregate_sentiment, 4) + " items=" +
                         std::to_string(doc.items.size());
    return doc;
}

/// Compact text block of the capped items (for prompt rendering).
inline std::string render_evidence_items(const EvidenceDocument& doc) {
    std::string s;
    for (const EvidenceItem& it : doc.items) {
        s += "[" + std::to_string(it.ts) + " ";
        s += to_string(it.source);
        if (it.sentiment) s += " " + fmt_fixed(*it.sentiment, 2);
        s += "] " + it.text + "\n";
    }
    return s;
}

} // namespace cta
