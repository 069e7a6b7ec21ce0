#pragma once

// Model document: a self-describing text file holding one fitted
// SwitchingParams plus provenance and fit diagnostics.
//
//   # liqregime-model v1
//   # side=bid                 (free-form metadata, e.g. transform, band_ticks)
//   states 4
//   alpha <K reals>
//   beta_lag <K reals>
//   beta_dbam <K reals>
//   sigma <K reals>
//   trans.<i> <K reals>        (one line per row, i = 1..K)
//   init_dist <K reals>
//   loglik <real>
//   converged <0|1>
//   best_restart <1-based index>
//   restart.<r> loglik=<real> iterations=<n> converged=<0|1> status=<ok|failed>
//
// Reals use 17 significant digits so a read-back model is bit-identical.

#include <istream>
#include <optional>
#include <ostream>

#include "liqregime/regime.hpp"
#include "liqregime/text.hpp"

namespace liqregime::regime {

struct ModelDocument {
    text::Metadata meta;
    SwitchingParams params;
    std::optional<double> loglik;
    std::optional<FitDiagnostics> diagnostics;
};

void write_model(std::ostream& out, const ModelDocument& doc);
ModelDocument read_model(std::istream& in);

}  // namespace liqregime::regime
