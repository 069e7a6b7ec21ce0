#pragma once

// Series text format:
//   # liqregime-series v1
//   # key=value            (metadata, any number of lines)
//   ts_ns,liq,liq_lag,dbam[,state]
//
// Reals are written in shortest round-trip form, so a series read back is
// bit-identical to the one written.

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "liqregime/book.hpp"
#include "liqregime/text.hpp"

namespace liqregime::book {

struct SeriesTable {
    text::Metadata meta;
    std::vector<std::int64_t> ts_ns;
    std::vector<double> liq;
    std::vector<double> liq_lag;
    std::vector<double> dbam;
    std::vector<int> states;  // optional 1-based state column (simulated data)

    std::size_t size() const noexcept { return ts_ns.size(); }
};

SeriesTable to_table(text::Metadata meta, std::span<const LiquidityObservation> series);

void write_series(std::ostream& out, const SeriesTable& table);
SeriesTable read_series(std::istream& in);

}  // namespace liqregime::book
