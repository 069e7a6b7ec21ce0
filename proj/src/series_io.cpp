#include "liqregime/series_io.hpp"

#include <string>

namespace liqregime::book {

namespace {
constexpr std::string_view kMagic = "# liqregime-series v1";
}

SeriesTable to_table(text::Metadata meta, std::span<const LiquidityObservation> series) {
    SeriesTable t;
    t.meta = std::move(meta);
    t.ts_ns.reserve(series.size());
    t.liq.reserve(series.size());
    t.liq_lag.reserve(series.size());
    t.dbam.reserve(series.size());
    for (const auto& o : series) {
        t.ts_ns.push_back(o.ts_ns);
        t.liq.push_back(o.liq);
        t.liq_lag.push_back(o.liq_lag);
        t.dbam.push_back(o.dbam);
    }
    return t;
}

void write_series(std::ostream& out, const SeriesTable& table) {
    const bool with_states = !table.states.empty();
    out << kMagic << '\n';
    for (const auto& [k, v] : table.meta) out << "# " << k << '=' << v << '\n';
    out << "# columns=ts_ns,liq,liq_lag,dbam" << (with_states ? ",state" : "") << '\n';
    std::string line;
    for (std::size_t i = 0; i < table.size(); ++i) {
        line.clear();
        line += std::to_string(table.ts_ns[i]);
        line += ',';
        line += text::format_shortest(table.liq[i]);
        line += ',';
        line += text::format_shortest(table.liq_lag[i]);
        line += ',';
        line += text::format_shortest(table.dbam[i]);
        if (with_states) {
            line += ',';
            line += std::to_string(table.states[i]);
        }
        line += '\n';
        out << line;
    }
}

SeriesTable read_series(std::istream& in) {
    SeriesTable t;
    std::string line;
    std::size_t line_no = 0;
    bool with_states = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = text::trim(line);
        if (view.empty()) continue;
        if (view.front() == '#') {
            view = text::trim(view.substr(1));
            const auto eq = view.find('=');
            if (eq == std::string_view::npos) continue;
            std::string key(text::trim(view.substr(0, eq)));
            std::string value(text::trim(view.substr(eq + 1)));
            if (key == "columns") {
                with_states = value == "ts_ns,liq,liq_lag,dbam,state";
                continue;
            }
            t.meta.emplace_back(std::move(key), std::move(value));
            continue;
        }
        const auto fields = text::split(view, ',');
        const std::string where = "series line " + std::to_string(line_no);
        if (fields.size() != (with_states ? 5u : 4u)) {
            throw text::ParseError(where + ": expected " + (with_states ? "5" : "4") + " columns");
        }
        t.ts_ns.push_back(text::parse_int(fields[0], where + " ts_ns"));
        t.liq.push_back(text::parse_double(fields[1], where + " liq"));
        t.liq_lag.push_back(text::parse_double(fields[2], where + " liq_lag"));
        t.dbam.push_back(text::parse_double(fields[3], where + " dbam"));
        if (with_states) t.states.push_back(static_cast<int>(text::parse_int(fields[4], where + " state")));
    }
    return t;
}

}  // namespace liqregime::book
