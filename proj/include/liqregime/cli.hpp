#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "liqregime/book.hpp"
#include "liqregime/regime.hpp"
#include "liqregime/signal.hpp"
#include "liqregime/text.hpp"

namespace liqregime::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,          // bad flags or configuration
    kInputError = 2,     // unreadable/invalid input, no observations
    kNoConvergence = 3,  // fit: model written, but no restart met tol
    kStarvation = 4,     // fit: every restart starved a state
    kDegenerate = 5,     // numerical degeneracy in filter/smoother
};

enum class SideSelection { Bid, Ask, Both };

struct RunConfig {
    SideSelection side = SideSelection::Both;
    book::Transform transform = book::Transform::Log1p;
    int band_ticks = 4;
    std::size_t k = 4;
    regime::FitConfig fit;
    signal::SignalConfig signal;
    bool strict = true;
    std::string input;
    std::string output;
    std::string model;
};

/// Applies flat key=value settings; unknown keys throw ConfigError.
void apply_settings(RunConfig& cfg, const text::Metadata& kv);

/// Settings echoed into output headers.
text::Metadata describe(const RunConfig& cfg);

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Inserts ".bid"/".ask" before the extension of `path`.
std::string side_path(const std::string& path, feed::Side side);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liqregime::cli
