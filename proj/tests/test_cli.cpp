#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "liqregime/cli.hpp"
#include "liqregime/model_io.hpp"
#include "liqregime/series_io.hpp"

using namespace liqregime;
namespace fs = std::filesystem;

namespace {

const fs::path kData = LIQREGIME_TEST_DATA;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("liqregime_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& body) const {
        std::ofstream(dir_ / name, std::ios::binary) << body;
    }

    fs::path dir_;
};

regime::ModelDocument load_model(const std::string& p) {
    std::ifstream in(p);
    return regime::read_model(in);
}

}  // namespace

TEST(CliConfig, SidePathAndSettings) {
    EXPECT_EQ(cli::side_path("out/series.csv", feed::Side::Bid), "out/series.bid.csv");
    EXPECT_EQ(cli::side_path("series", feed::Side::Ask), "series.ask");
    cli::RunConfig cfg;
    cli::apply_settings(cfg, {{"k", "2"}, {"delay_ms", "5"}, {"side", "ask"}, {"strict", "false"}});
    EXPECT_EQ(cfg.k, 2u);
    EXPECT_EQ(cfg.signal.delay_ns, 5'000'000);
    EXPECT_EQ(cfg.side, cli::SideSelection::Ask);
    EXPECT_FALSE(cfg.strict);
    EXPECT_THROW(cli::apply_settings(cfg, {{"colour", "red"}}), cli::ConfigError);
    EXPECT_THROW(cli::apply_settings(cfg, {{"threshold", "1.5"}}), cli::ConfigError);
}

TEST_F(Cli, ExtractMatchesGoldenFiles) {
    const auto r = run({"extract", (kData / "feed_500.csv").string(), "-o", path("series.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("series.bid.csv")), slurp(kData / "golden" / "series.bid.csv"));
    EXPECT_EQ(slurp(path("series.ask.csv")), slurp(kData / "golden" / "series.ask.csv"));
}

TEST_F(Cli, ExtractBothSidesShareTheFeedClock) {
    ASSERT_EQ(run({"extract", (kData / "feed_500.csv").string(), "-o", path("s.csv"), "--transform", "raw"}).code, 0);
    std::ifstream feed_in(kData / "feed_500.csv");
    const auto feed = feed::stream_messages(feed_in).messages;
    for (const char* side : {"bid", "ask"}) {
        std::ifstream in(path(std::string("s.") + side + ".csv"));
        const auto t = book::read_series(in);
        ASSERT_GT(t.size(), 0u);
        EXPECT_GE(t.ts_ns.front(), feed.front().ts_ns);
        EXPECT_LE(t.ts_ns.back(), feed.back().ts_ns);
        EXPECT_EQ(text::lookup(t.meta, "side").value(), side);
        EXPECT_EQ(text::lookup(t.meta, "transform").value(), "raw");
    }
}

TEST_F(Cli, ExtractEmptyFeedFails) {
    write("empty.csv", "# nothing here\n");
    const auto r = run({"extract", path("empty.csv"), "-o", path("x.csv")});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.err.find("no observations"), std::string::npos);
}

TEST_F(Cli, ExtractStrictVersusLenient) {
    write("bad.csv",
          "1,10,B,U,N,9000,5,1\n2,20,A,U,N,9001,5,1\nnot,a,record\n3,30,B,U,N,8999,5,2\n4,40,B,U,C,8999,7,2\n");
    const auto strict = run({"extract", path("bad.csv"), "-o", path("x.csv"), "--side", "bid"});
    EXPECT_EQ(strict.code, cli::kInputError);
    EXPECT_NE(strict.err.find("line 3"), std::string::npos) << strict.err;
    const auto lenient = run({"extract", path("bad.csv"), "-o", path("x.csv"), "--side", "bid", "--lenient"});
    EXPECT_EQ(lenient.code, 0) << lenient.err;
    EXPECT_NE(lenient.out.find("skipped: 1"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("x.csv")));
}

TEST_F(Cli, FitBundledTwoStateSeries) {
    const auto r = run({"fit", (kData / "two_state.csv").string(), "--k", "2", "-o", path("m.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("sigma_2"), std::string::npos);
    EXPECT_NE(r.out.find("Log Lik."), std::string::npos);
    const auto doc = load_model(path("m.txt"));
    const double alpha[] = {0.1, 0.5}, bl[] = {0.9, 0.3}, bd[] = {0.2, -0.4}, sigma[] = {0.05, 0.4};
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(doc.params.alpha[j], alpha[j], 0.05);
        EXPECT_NEAR(doc.params.beta_lag[j], bl[j], 0.05);
        EXPECT_NEAR(doc.params.beta_dbam[j], bd[j], 0.05);
        EXPECT_NEAR(doc.params.sigma[j], sigma[j], 0.02);
    }
    ASSERT_TRUE(doc.diagnostics);
    EXPECT_EQ(doc.diagnostics->restarts.size(), 8u);
    EXPECT_EQ(text::lookup(doc.meta, "source").value(), "two_state.csv");

    // Same seed, same bytes.
    ASSERT_EQ(run({"fit", (kData / "two_state.csv").string(), "--k", "2", "-o", path("m2.txt")}).code, 0);
    EXPECT_EQ(slurp(path("m.txt")), slurp(path("m2.txt")));
}

TEST_F(Cli, FitSingleStatePrintsOls) {
    const auto r = run({"fit", (kData / "two_state.csv").string(), "--k", "1", "-o", path("m.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(kData / "two_state.csv");
    const auto t = book::read_series(in);
    regime::RegressionData d{t.liq, t.liq_lag, t.dbam};
    const auto o = regime::ols(d);
    auto f4 = [](double v) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(4) << v;
        return s.str();
    };
    for (auto [label, v] : {std::pair{"alpha_1", o.alpha}, std::pair{"beta_11", o.beta_lag},
                            std::pair{"beta_12", o.beta_dbam}, std::pair{"sigma_1", o.sigma}}) {
        const auto pos = r.out.find(label);
        ASSERT_NE(pos, std::string::npos);
        const auto eol = r.out.find('\n', pos);
        EXPECT_NE(r.out.substr(pos, eol - pos).find(f4(v)), std::string::npos) << label;
    }
}

TEST_F(Cli, FitExitCodes) {
    const auto nc = run({"fit", (kData / "two_state.csv").string(), "--k", "2", "--max-iter", "1", "-o",
                         path("nc.txt")});
    EXPECT_EQ(nc.code, cli::kNoConvergence);
    EXPECT_TRUE(fs::exists(path("nc.txt")));

    std::ostringstream body;
    body << "# liqregime-series v1\n# columns=ts_ns,liq,liq_lag,dbam\n";
    double y = 0.0;
    for (int t = 0; t < 200; ++t) {
        const double next = t % 50 ? 1.0 : 5.0;
        body << t << ',' << next << ',' << y << ",0\n";
        y = next;
    }
    write("starve.csv", body.str());
    EXPECT_EQ(run({"fit", path("starve.csv"), "--k", "4", "--restarts", "2", "-o", path("s.txt")}).code,
              cli::kStarvation);

    const auto short_series = run({"fit", path("starve.csv"), "--k", "5", "-o", path("s.txt")});
    EXPECT_EQ(short_series.code, cli::kInputError);
}

TEST_F(Cli, DetectMatchesLibraryAndHandCounts) {
    ASSERT_EQ(run({"fit", (kData / "two_state.csv").string(), "--k", "2", "-o", path("m.txt")}).code, 0);
    const auto r = run({"detect", (kData / "two_state.csv").string(), "--model", path("m.txt"), "-o",
                        path("ev.csv"), "--report", path("r.txt"), "--report-json", path("r.json")});
    ASSERT_EQ(r.code, 0) << r.err;

    std::ifstream in(kData / "two_state.csv");
    const auto t = book::read_series(in);
    signal::Detector det(load_model(path("m.txt")).params, {});
    for (std::size_t i = 0; i < t.size(); ++i) det.on_observation(t.ts_ns[i], {t.liq[i], t.liq_lag[i], t.dbam[i]});
    const auto want = signal::report(det.tracker());
    EXPECT_NE(slurp(path("r.txt")).find("fires: " + std::to_string(want.fires) + "\n"), std::string::npos);
    EXPECT_GT(want.fires, 0);

    std::istringstream ev(slurp(path("ev.csv")));
    std::string line;
    std::size_t rows = 0, fires = 0;
    while (std::getline(ev, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++rows;
        const auto fields = text::split(line, ',');
        ASSERT_EQ(fields.size(), 5u);
        fires += fields[2] == "1";
    }
    EXPECT_EQ(rows, t.size());
    EXPECT_EQ(static_cast<std::int64_t>(fires), want.fires);

    const auto bad = run({"detect", (kData / "two_state.csv").string(), "--model", path("m.txt"), "-o",
                          path("ev3.csv"), "--state-index", "3"});
    EXPECT_EQ(bad.code, cli::kUsage);
}

TEST_F(Cli, DetectReportsPublishedDuration) {
    // Two well-separated regimes; y jumps to the high state 636 times in 1000 s.
    regime::ModelDocument doc;
    doc.params = regime::make_params({0.0, 10.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}, 0.5);
    {
        std::ofstream out(path("m.txt"));
        regime::write_model(out, doc);
    }
    book::SeriesTable s;
    const std::int64_t gap = 1'000'000'000'000LL / 636;
    auto add = [&](std::int64_t ts, double y) {
        s.ts_ns.push_back(ts);
        s.liq_lag.push_back(s.liq.empty() ? 0.0 : s.liq.back());
        s.liq.push_back(y);
        s.dbam.push_back(0.0);
    };
    for (int i = 0; i < 636; ++i) {
        add(i * gap, 10.0);
        add(i * gap + 50'000'000, 0.0);
    }
    add(1'000'000'000'000LL, 0.0);
    {
        std::ofstream out(path("s.csv"));
        book::write_series(out, s);
    }
    const auto r = run({"detect", path("s.csv"), "--model", path("m.txt"), "-o", path("ev.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("fires: 636\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("signal duration (raw): 0.636%"), std::string::npos) << r.out;
}

TEST_F(Cli, DetectNeverFiresBelowThreshold) {
    regime::ModelDocument doc;
    doc.params = regime::make_params({0.0, 10.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}, 0.5);
    {
        std::ofstream out(path("m.txt"));
        regime::write_model(out, doc);
    }
    std::ostringstream body;
    body << "# liqregime-series v1\n# columns=ts_ns,liq,liq_lag,dbam\n";
    for (int t = 0; t < 1000; ++t) body << t * 1000000 << ",0.5,0.5,0\n";
    write("s.csv", body.str());
    const auto r = run({"detect", path("s.csv"), "--model", path("m.txt"), "-o", path("ev.csv"), "--threshold",
                        "0.999999999"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("fires: 0\n"), std::string::npos);
    EXPECT_NE(r.out.find("signal duration (raw): 0%"), std::string::npos);
}

TEST_F(Cli, SimulateIsDeterministicAndConstantWithoutNoise) {
    write("flat.spec", "alpha = 0\nbeta_lag = 1\nbeta_dbam = 0\nsigma = 0\nT = 100\ny0 = 2.5\ndbam_model = zeros\n");
    ASSERT_EQ(run({"simulate", "--spec", path("flat.spec"), "-o", path("a.csv"), "--states-out", path("st.csv")}).code, 0);
    std::ifstream in(path("a.csv"));
    const auto t = book::read_series(in);
    ASSERT_EQ(t.size(), 100u);
    for (double y : t.liq) EXPECT_EQ(y, 2.5);
    EXPECT_TRUE(fs::exists(path("st.csv")));

    ASSERT_EQ(run({"simulate", "--spec", (kData / "two_state.spec").string(), "-o", path("b.csv")}).code, 0);
    ASSERT_EQ(run({"simulate", "--spec", (kData / "two_state.spec").string(), "-o", path("c.csv")}).code, 0);
    EXPECT_EQ(slurp(path("b.csv")), slurp(path("c.csv")));
    EXPECT_EQ(slurp(path("b.csv")), slurp(kData / "two_state.csv"));

    write("bad.spec", "alpha = 0\nbeta_lag = 1\nbeta_dbam = 0\nsigma = 1\nT = 10\nflavour = x\n");
    EXPECT_EQ(run({"simulate", "--spec", path("bad.spec"), "-o", path("d.csv")}).code, cli::kUsage);
}

TEST_F(Cli, ReportTabulatesModels) {
    ASSERT_EQ(run({"fit", (kData / "two_state.csv").string(), "--k", "2", "-o", path("m.txt")}).code, 0);
    ASSERT_EQ(run({"detect", (kData / "two_state.csv").string(), "--model", path("m.txt"), "-o", path("e.csv"),
                   "--report-json", path("r.json")})
                  .code,
              0);
    const auto r = run({"report", "--model", path("m.txt"), "--signal", path("r.json"), "--label", "Bid"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("Bid"), std::string::npos);
    EXPECT_NE(r.out.find("Log Lik."), std::string::npos);
    EXPECT_NE(r.out.find("Sig. Dur."), std::string::npos);
}

TEST_F(Cli, ConfigFileWithFlagOverrides) {
    write("run.cfg", "# sweep settings\nk = 1\nrestarts = 2\n");
    ASSERT_EQ(run({"fit", (kData / "two_state.csv").string(), "--config", path("run.cfg"), "-o", path("a.txt")}).code, 0);
    EXPECT_EQ(load_model(path("a.txt")).params.num_states(), 1u);
    ASSERT_EQ(run({"fit", (kData / "two_state.csv").string(), "--config", path("run.cfg"), "--k", "2", "-o",
                   path("b.txt")})
                  .code,
              0);
    const auto b = load_model(path("b.txt"));
    EXPECT_EQ(b.params.num_states(), 2u);
    EXPECT_EQ(b.diagnostics->restarts.size(), 2u);
    EXPECT_EQ(text::lookup(b.meta, "config.restarts").value(), "2");

    write("bad.cfg", "colour = red\n");
    EXPECT_EQ(run({"fit", (kData / "two_state.csv").string(), "--config", path("bad.cfg"), "-o", path("c.txt")}).code,
              cli::kUsage);
}

TEST(CliUsage, BadInvocations) {
    EXPECT_EQ(run({}).code, cli::kUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
    EXPECT_EQ(run({"fit"}).code, cli::kUsage);
    EXPECT_EQ(run({"--help"}).code, cli::kOk);
    EXPECT_EQ(run({"fit", "/nonexistent/series.csv", "-o", "/tmp/x"}).code, cli::kInputError);
}
