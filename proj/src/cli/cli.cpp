#include "liqregime/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "liqregime/feed.hpp"
#include "liqregime/model_io.hpp"
#include "liqregime/series_io.hpp"
#include "liqregime/synth.hpp"

namespace liqregime::cli {

namespace {

constexpr const char* kVersion = LIQREGIME_VERSION;

/// Error carrying its exit code up to run().
class CommandError : public Error {
public:
    CommandError(int code, const std::string& what) : Error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

const char* side_selection_name(SideSelection s) {
    switch (s) {
        case SideSelection::Bid: return "bid";
        case SideSelection::Ask: return "ask";
        case SideSelection::Both: return "both";
    }
    return "?";
}

SideSelection parse_side(std::string_view v) {
    if (v == "bid") return SideSelection::Bid;
    if (v == "ask") return SideSelection::Ask;
    if (v == "both") return SideSelection::Both;
    throw ConfigError("side must be bid, ask or both (got '" + std::string(v) + "')");
}

bool parse_bool(std::string_view v, std::string_view key) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw ConfigError(std::string(key) + " must be a boolean");
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CommandError(kInputError, "cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CommandError(kInputError, "cannot write '" + path + "'");
    return out;
}

std::string base_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

text::Metadata tool_header(std::string_view command, const RunConfig& cfg) {
    text::Metadata meta{{"tool", "liqregime"}, {"version", kVersion}, {"command", std::string(command)}};
    for (const auto& [k, v] : describe(cfg)) meta.emplace_back("config." + k, v);
    return meta;
}

std::string fixed4(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

struct TableColumn {
    std::string label;
    regime::SwitchingParams params;
    std::optional<double> loglik;
    std::optional<double> duration_pct;
};

// Coefficient-by-column layout: alpha_j, beta_j1 (lag), beta_j2 (dbam), sigma_j rows.
void print_table(std::ostream& out, const std::vector<TableColumn>& cols) {
    const std::size_t k = cols.front().params.num_states();
    constexpr int kLabelWidth = 12;
    constexpr int kColWidth = 14;
    out << std::left << std::setw(kLabelWidth) << "Coefficient";
    for (const auto& c : cols) out << std::right << std::setw(kColWidth) << c.label;
    out << '\n';
    auto row = [&](const std::string& name, auto&& value) {
        out << std::left << std::setw(kLabelWidth) << name;
        for (const auto& c : cols) out << std::right << std::setw(kColWidth) << value(c);
        out << '\n';
    };
    for (std::size_t j = 0; j < k; ++j)
        row("alpha_" + std::to_string(j + 1), [&](const TableColumn& c) { return fixed4(c.params.alpha[j]); });
    for (std::size_t j = 0; j < k; ++j) {
        row("beta_" + std::to_string(j + 1) + "1", [&](const TableColumn& c) { return fixed4(c.params.beta_lag[j]); });
        row("beta_" + std::to_string(j + 1) + "2", [&](const TableColumn& c) { return fixed4(c.params.beta_dbam[j]); });
    }
    for (std::size_t j = 0; j < k; ++j)
        row("sigma_" + std::to_string(j + 1), [&](const TableColumn& c) { return fixed4(c.params.sigma[j]); });
    for (std::size_t j = 0; j < k; ++j)
        row("p_" + std::to_string(j + 1) + std::to_string(j + 1),
            [&](const TableColumn& c) { return fixed4(c.params.trans(j, j)); });
    bool any_ll = false, any_dur = false;
    for (const auto& c : cols) {
        any_ll |= c.loglik.has_value();
        any_dur |= c.duration_pct.has_value();
    }
    if (any_ll) {
        row("Log Lik.", [&](const TableColumn& c) {
            if (!c.loglik) return std::string("-");
            std::ostringstream os;
            os << std::fixed << std::setprecision(2) << *c.loglik;
            return os.str();
        });
    }
    if (any_dur) {
        row("Sig. Dur.", [&](const TableColumn& c) {
            if (!c.duration_pct) return std::string("-");
            std::ostringstream os;
            os << std::fixed << std::setprecision(3) << *c.duration_pct << '%';
            return os.str();
        });
    }
}

regime::RegressionData to_regression(const book::SeriesTable& t) {
    regime::RegressionData d;
    d.y = t.liq;
    d.y_lag = t.liq_lag;
    d.dbam = t.dbam;
    return d;
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

struct SideOutcome {
    std::vector<book::LiquidityObservation> series;
    book::ZScoreStats zstats;
    std::size_t book_errors = 0;
    std::size_t crossed = 0;
};

SideOutcome extract_side(std::span<const feed::MarketMessage> messages, feed::Side side, const RunConfig& cfg) {
    const bool zscore = cfg.transform == book::Transform::ZScore;
    book::SeriesExtractor ex(side, zscore ? book::Transform::Raw : cfg.transform, cfg.band_ticks,
                             cfg.strict ? book::BookMode::Strict : book::BookMode::Lenient);
    SideOutcome r;
    for (const auto& msg : messages) {
        try {
            if (auto obs = ex.push(msg)) {
                r.crossed += obs->crossed ? 1 : 0;
                r.series.push_back(*obs);
            }
        } catch (const book::BookError&) {
            if (cfg.strict) throw;
            ++r.book_errors;
        }
    }
    if (zscore) r.zstats = book::zscore_in_place(r.series);
    return r;
}

void write_side(const std::string& path, feed::Side side, const SideOutcome& r, const RunConfig& cfg,
                const std::string& source) {
    text::Metadata meta = tool_header("extract", cfg);
    meta.emplace_back("source", source);
    meta.emplace_back("side", feed::side_name(side));
    meta.emplace_back("transform", book::transform_name(cfg.transform));
    meta.emplace_back("band_ticks", std::to_string(cfg.band_ticks));
    if (cfg.transform == book::Transform::ZScore) {
        meta.emplace_back("zscore_mean", text::format_17g(r.zstats.mean));
        meta.emplace_back("zscore_scale", text::format_17g(r.zstats.scale));
    }
    auto out = open_out(path);
    book::write_series(out, book::to_table(std::move(meta), r.series));
}

int cmd_extract(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.output.empty()) throw ConfigError("extract needs --out");
    auto in = open_in(cfg.input);
    const auto mode = cfg.strict ? feed::ParseMode::Strict : feed::ParseMode::Lenient;
    const feed::StreamResult feed = feed::stream_messages(in, mode);

    std::vector<feed::Side> sides;
    if (cfg.side != SideSelection::Ask) sides.push_back(feed::Side::Bid);
    if (cfg.side != SideSelection::Bid) sides.push_back(feed::Side::Ask);

    std::vector<SideOutcome> outcomes(sides.size());
    std::vector<std::exception_ptr> failures(sides.size());
    {
        // Each side runs its own book over the shared, immutable message vector.
        std::vector<std::jthread> pipelines;
        for (std::size_t i = 0; i < sides.size(); ++i) {
            pipelines.emplace_back([&, i] {
                try {
                    outcomes[i] = extract_side(feed.messages, sides[i], cfg);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            });
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    out << "messages: " << feed.messages.size() << "\nskipped: " << feed.skipped << '\n';
    bool any = false;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        const auto& r = outcomes[i];
        out << feed::side_name(sides[i]) << " observations: " << r.series.size() << '\n';
        if (r.book_errors) err << feed::side_name(sides[i]) << ": skipped " << r.book_errors << " book errors\n";
        if (r.crossed) err << feed::side_name(sides[i]) << ": " << r.crossed << " observations from a crossed book\n";
        any |= !r.series.empty();
    }
    if (!any) throw CommandError(kInputError, "no observations");

    const std::string source = base_name(cfg.input);
    for (std::size_t i = 0; i < sides.size(); ++i) {
        const std::string path = sides.size() == 1 ? cfg.output : side_path(cfg.output, sides[i]);
        write_side(path, sides[i], outcomes[i], cfg, source);
        out << "wrote " << path << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.output.empty()) throw ConfigError("fit needs --out");
    auto in = open_in(cfg.input);
    const book::SeriesTable table = book::read_series(in);
    if (table.size() < 50 * cfg.k) {
        throw CommandError(kInputError, "series has " + std::to_string(table.size()) + " rows; fitting " +
                                            std::to_string(cfg.k) + " states needs at least " +
                                            std::to_string(50 * cfg.k));
    }
    const regime::RegressionData data = to_regression(table);
    const regime::FitResult result = regime::fit(data, cfg.k, cfg.fit);

    regime::ModelDocument doc;
    doc.meta = tool_header("fit", cfg);
    doc.meta.emplace_back("source", base_name(cfg.input));
    for (const char* key : {"side", "transform", "band_ticks", "zscore_mean", "zscore_scale"}) {
        if (auto v = text::lookup(table.meta, key)) doc.meta.emplace_back(key, *v);
    }
    doc.meta.emplace_back("observations", std::to_string(table.size()));
    doc.meta.emplace_back("label_rule", "sigma_ascending");
    doc.params = result.params;
    doc.loglik = result.loglik;
    doc.diagnostics = result.diagnostics;
    {
        auto model_out = open_out(cfg.output);
        regime::write_model(model_out, doc);
    }

    print_table(out, {{std::to_string(cfg.k) + "-State", result.params, result.loglik, std::nullopt}});
    out << "wrote " << cfg.output << '\n';
    if (!result.diagnostics.converged) {
        err << "warning: no restart converged within " << cfg.fit.max_iter << " iterations; best effort written\n";
        return kNoConvergence;
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

int cmd_detect(const RunConfig& cfg, const std::string& report_path, const std::string& json_path,
               std::ostream& out) {
    if (cfg.output.empty()) throw ConfigError("detect needs --out");
    if (cfg.model.empty()) throw ConfigError("detect needs --model");
    auto series_in = open_in(cfg.input);
    const book::SeriesTable table = book::read_series(series_in);
    auto model_in = open_in(cfg.model);
    const regime::ModelDocument doc = regime::read_model(model_in);

    signal::Detector det(doc.params, cfg.signal);
    const std::size_t state = det.config().state_index;

    auto events = open_out(cfg.output);
    text::Metadata meta = tool_header("detect", cfg);
    meta.emplace_back("source", base_name(cfg.input));
    meta.emplace_back("model", base_name(cfg.model));
    meta.emplace_back("state_index", std::to_string(state));
    meta.emplace_back("threshold", text::format_shortest(det.config().threshold));
    meta.emplace_back("delay_ns", std::to_string(det.config().delay_ns));
    events << "# liqregime-events v1\n";
    for (const auto& [k, v] : meta) events << "# " << k << '=' << v << '\n';
    events << "# columns=ts_ns,prob_state,fire,decision,window_end_ns\n";
    for (std::size_t t = 0; t < table.size(); ++t) {
        const auto v = det.on_observation(table.ts_ns[t], {table.liq[t], table.liq_lag[t], table.dbam[t]});
        events << signal::format_event(table.ts_ns[t], v) << '\n';
    }

    const signal::SignalReport rep = signal::report(det.tracker());
    if (!report_path.empty()) {
        auto r = open_out(report_path);
        signal::write_report_text(r, rep, state);
    }
    if (!json_path.empty()) {
        auto j = open_out(json_path);
        j << signal::report_json(rep, state) << '\n';
    }
    signal::write_report_text(out, rep, state);
    out << "signal duration (raw): " << text::format_shortest(rep.duration_raw_pct) << "%\n"
        << "signal duration (merged): " << text::format_shortest(rep.duration_merged_pct) << "%\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& spec_path, const RunConfig& cfg, const std::string& states_path,
                 std::ostream& out) {
    if (cfg.output.empty()) throw ConfigError("simulate needs --out");
    auto in = open_in(spec_path);
    synth::SimSpec spec;
    try {
        spec = synth::parse_sim_spec(text::read_key_values(in, "simulation spec"));
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const synth::Simulation sim = synth::simulate(spec);

    book::SeriesTable table;
    table.meta = tool_header("simulate", cfg);
    table.meta.emplace_back("source", base_name(spec_path));
    table.meta.emplace_back("side", "synthetic");
    table.meta.emplace_back("transform", "none");
    table.meta.emplace_back("states", std::to_string(spec.params.num_states()));
    table.meta.emplace_back("seed", std::to_string(spec.seed));
    table.meta.emplace_back("ts_step_ns", std::to_string(spec.ts_step_ns));
    const std::size_t n = sim.data.size();
    table.ts_ns.resize(n);
    for (std::size_t t = 0; t < n; ++t) table.ts_ns[t] = static_cast<std::int64_t>(t) * spec.ts_step_ns;
    table.liq = sim.data.y;
    table.liq_lag = sim.data.y_lag;
    table.dbam = sim.data.dbam;
    table.states.resize(n);
    for (std::size_t t = 0; t < n; ++t) table.states[t] = sim.states[t] + 1;
    {
        auto series_out = open_out(cfg.output);
        book::write_series(series_out, table);
    }
    if (!states_path.empty()) {
        auto s = open_out(states_path);
        s << "# liqregime-states v1\n# columns=ts_ns,state\n";
        for (std::size_t t = 0; t < n; ++t) s << table.ts_ns[t] << ',' << table.states[t] << '\n';
    }
    out << "simulated " << n << " observations\nwrote " << cfg.output << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

double json_number(const std::string& path, const char* key) {
    auto in = open_in(path);
    try {
        const auto j = nlohmann::json::parse(in);
        return j.at(key).get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw CommandError(kInputError, path + ": " + e.what());
    }
}

int cmd_report(const std::vector<std::string>& models, const std::vector<std::string>& signals,
               const std::vector<std::string>& labels, std::ostream& out) {
    if (models.empty()) throw ConfigError("report needs at least one --model");
    if (!signals.empty() && signals.size() != models.size()) {
        throw ConfigError("give one --signal per --model, or none");
    }
    if (!labels.empty() && labels.size() != models.size()) throw ConfigError("give one --label per --model, or none");
    std::vector<TableColumn> cols;
    for (std::size_t i = 0; i < models.size(); ++i) {
        auto in = open_in(models[i]);
        const regime::ModelDocument doc = regime::read_model(in);
        TableColumn c;
        c.label = labels.empty() ? base_name(models[i]) : labels[i];
        c.params = doc.params;
        c.loglik = doc.loglik;
        if (!signals.empty()) c.duration_pct = json_number(signals[i], "duration_raw_pct");
        if (!cols.empty() && cols.front().params.num_states() != c.params.num_states()) {
            throw CommandError(kInputError, "models in one report must share the number of states");
        }
        cols.push_back(std::move(c));
    }
    print_table(out, cols);
    return kOk;
}

}  // namespace

void apply_settings(RunConfig& cfg, const text::Metadata& kv) {
    for (const auto& [key, value] : kv) {
        try {
            if (key == "side") cfg.side = parse_side(value);
            else if (key == "transform") {
                auto t = book::parse_transform(value);
                if (!t) throw ConfigError("transform must be raw, log1p or zscore");
                cfg.transform = *t;
            }
            else if (key == "band_ticks") cfg.band_ticks = static_cast<int>(text::parse_int(value, key));
            else if (key == "k") cfg.k = static_cast<std::size_t>(text::parse_int(value, key));
            else if (key == "max_iter") cfg.fit.max_iter = static_cast<int>(text::parse_int(value, key));
            else if (key == "tol") cfg.fit.tol = text::parse_double(value, key);
            else if (key == "restarts") cfg.fit.restarts = static_cast<int>(text::parse_int(value, key));
            else if (key == "seed") cfg.fit.seed = static_cast<std::uint64_t>(text::parse_int(value, key));
            else if (key == "sigma_floor") cfg.fit.sigma_floor = text::parse_double(value, key);
            else if (key == "threads") cfg.fit.threads = static_cast<unsigned>(text::parse_int(value, key));
            else if (key == "state_index") cfg.signal.state_index = static_cast<std::size_t>(text::parse_int(value, key));
            else if (key == "threshold") cfg.signal.threshold = text::parse_double(value, key);
            else if (key == "delay_ms") cfg.signal.delay_ns = std::llround(text::parse_double(value, key) * 1e6);
            else if (key == "delay_ns") cfg.signal.delay_ns = text::parse_int(value, key);
            else if (key == "strict") cfg.strict = parse_bool(value, key);
            else if (key == "input") cfg.input = value;
            else if (key == "output") cfg.output = value;
            else if (key == "model") cfg.model = value;
            else throw ConfigError("unknown setting '" + key + "'");
        } catch (const text::ParseError& e) {
            throw ConfigError(e.what());
        }
    }
    if (cfg.band_ticks < 1) throw ConfigError("band_ticks must be >= 1");
    if (cfg.k < 1) throw ConfigError("k must be >= 1");
    if (cfg.signal.delay_ns <= 0) throw ConfigError("delay must be positive");
    if (!(cfg.signal.threshold > 0.0 && cfg.signal.threshold < 1.0)) throw ConfigError("threshold must be in (0, 1)");
    try {
        regime::validate(cfg.fit);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

text::Metadata describe(const RunConfig& cfg) {
    return {{"side", side_selection_name(cfg.side)},
            {"transform", book::transform_name(cfg.transform)},
            {"band_ticks", std::to_string(cfg.band_ticks)},
            {"k", std::to_string(cfg.k)},
            {"max_iter", std::to_string(cfg.fit.max_iter)},
            {"tol", text::format_shortest(cfg.fit.tol)},
            {"restarts", std::to_string(cfg.fit.restarts)},
            {"seed", std::to_string(cfg.fit.seed)},
            {"sigma_floor", text::format_shortest(cfg.fit.sigma_floor)},
            {"state_index", std::to_string(cfg.signal.state_index)},
            {"threshold", text::format_shortest(cfg.signal.threshold)},
            {"delay_ns", std::to_string(cfg.signal.delay_ns)},
            {"strict", cfg.strict ? "1" : "0"}};
}

std::string side_path(const std::string& path, feed::Side side) {
    std::filesystem::path p(path);
    const std::string ext = p.extension().string();
    p.replace_extension();
    return p.string() + "." + feed::side_name(side) + ext;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Orderbook liquidity regimes: extract, fit, detect, simulate, report"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path;
    std::optional<std::string> side, transform;
    std::optional<int> band_ticks, max_iter, restarts;
    std::optional<std::size_t> k, state_index;
    std::optional<double> threshold, delay_ms, tol, sigma_floor;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool strict_flag = false, lenient_flag = false;

    auto shared = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value settings file");
        sub->add_option("--side", side, "bid | ask | both");
        sub->add_option("--transform", transform, "raw | log1p | zscore");
        sub->add_option("--band-ticks", band_ticks, "liquidity band half-width in ticks");
        sub->add_option("--k", k, "number of regimes");
        sub->add_option("--threshold", threshold, "signal probability threshold");
        sub->add_option("--delay-ms", delay_ms, "delay per signal in milliseconds");
        sub->add_option("--seed", seed, "fit seed");
        sub->add_flag("--strict", strict_flag, "abort on malformed input (default)");
        sub->add_flag("--lenient", lenient_flag, "skip and count malformed input");
        sub->add_option("--restarts", restarts, "EM restarts");
        sub->add_option("--max-iter", max_iter, "EM iterations per restart");
        sub->add_option("--tol", tol, "relative log-likelihood tolerance");
        sub->add_option("--sigma-floor", sigma_floor, "lower bound on regime sigma");
        sub->add_option("--threads", threads, "worker threads for restarts (0 = all cores)");
        sub->add_option("--state-index", state_index, "1-based signal state (default: K)");
    };

    RunConfig cfg;
    std::string report_path, json_path, spec_path, states_path;
    std::vector<std::string> report_models, report_signals, report_labels;

    auto* extract = app.add_subcommand("extract", "feed -> per-side liquidity series");
    extract->add_option("feed", cfg.input, "normalized feed file")->required();
    extract->add_option("-o,--out", cfg.output, "series output (.bid/.ask inserted for both sides)");
    shared(extract);

    auto* fit = app.add_subcommand("fit", "series -> regime model");
    fit->add_option("series", cfg.input, "series file")->required();
    fit->add_option("-o,--out", cfg.output, "model output");
    shared(fit);

    auto* detect = app.add_subcommand("detect", "series + model -> events and signal report");
    detect->add_option("series", cfg.input, "series file")->required();
    detect->add_option("--model", cfg.model, "model file");
    detect->add_option("-o,--out", cfg.output, "event output");
    detect->add_option("--report", report_path, "key:value report output");
    detect->add_option("--report-json", json_path, "JSON report output");
    shared(detect);

    auto* simulate = app.add_subcommand("simulate", "simulation spec -> synthetic series");
    simulate->add_option("--spec", spec_path, "simulation spec (key=value)")->required();
    simulate->add_option("-o,--out", cfg.output, "series output (with state column)");
    simulate->add_option("--states-out", states_path, "separate state-path output");
    shared(simulate);

    auto* report = app.add_subcommand("report", "tabulate fitted models side by side");
    report->add_option("--model", report_models, "model file (repeatable)")->required();
    report->add_option("--signal", report_signals, "detect --report-json file per model");
    report->add_option("--label", report_labels, "column label per model");

    std::vector<std::string> argv_store{"liqregime"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (!config_path.empty()) {
            auto in = open_in(config_path);
            apply_settings(cfg, text::read_key_values(in, "config"));
        }
        text::Metadata overrides;
        auto put = [&](const char* key, const auto& opt) {
            if (!opt) return;
            if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>) overrides.emplace_back(key, *opt);
            else if constexpr (std::is_floating_point_v<std::decay_t<decltype(*opt)>>)
                overrides.emplace_back(key, text::format_shortest(*opt));
            else overrides.emplace_back(key, std::to_string(*opt));
        };
        put("side", side);
        put("transform", transform);
        put("band_ticks", band_ticks);
        put("k", k);
        put("threshold", threshold);
        put("delay_ms", delay_ms);
        put("seed", seed);
        put("restarts", restarts);
        put("max_iter", max_iter);
        put("tol", tol);
        put("sigma_floor", sigma_floor);
        put("threads", threads);
        put("state_index", state_index);
        if (strict_flag && lenient_flag) throw ConfigError("--strict and --lenient are exclusive");
        if (strict_flag) overrides.emplace_back("strict", "1");
        if (lenient_flag) overrides.emplace_back("strict", "0");
        apply_settings(cfg, overrides);

        if (*extract) return cmd_extract(cfg, out, err);
        if (*fit) return cmd_fit(cfg, out, err);
        if (*detect) return cmd_detect(cfg, report_path, json_path, out);
        if (*simulate) return cmd_simulate(spec_path, cfg, states_path, out);
        if (*report) return cmd_report(report_models, report_signals, report_labels, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const signal::InvalidConfig& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const CommandError& e) {
        err << "error: " << e.what() << '\n';
        return e.code();
    } catch (const regime::StateStarvation& e) {
        err << "error: " << e.what() << '\n';
        return kStarvation;
    } catch (const regime::NumericalDegeneracy& e) {
        err << "error: " << e.what() << '\n';
        return kDegenerate;
    } catch (const feed::FeedError& e) {
        err << "feed error: " << e.what() << '\n';
        return kInputError;
    } catch (const book::BookError& e) {
        err << "book error: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kUsage;
}

}  // namespace liqregime::cli
