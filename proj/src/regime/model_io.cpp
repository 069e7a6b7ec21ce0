#include "liqregime/model_io.hpp"

#include <map>
#include <string>

namespace liqregime::regime {

namespace {

constexpr std::string_view kMagic = "# liqregime-model v1";

void put_vector(std::ostream& out, std::string_view key, std::span<const double> v) {
    out << key;
    for (double x : v) out << ' ' << text::format_17g(x);
    out << '\n';
}

std::vector<double> get_vector(std::span<const std::string_view> toks, std::string_view key) {
    std::vector<double> v;
    for (std::size_t i = 1; i < toks.size(); ++i) v.push_back(text::parse_double(toks[i], key));
    return v;
}

}  // namespace

void write_model(std::ostream& out, const ModelDocument& doc) {
    const SwitchingParams& p = doc.params;
    const std::size_t k = p.num_states();
    out << kMagic << '\n';
    for (const auto& [key, value] : doc.meta) out << "# " << key << '=' << value << '\n';
    out << "states " << k << '\n';
    put_vector(out, "alpha", p.alpha);
    put_vector(out, "beta_lag", p.beta_lag);
    put_vector(out, "beta_dbam", p.beta_dbam);
    put_vector(out, "sigma", p.sigma);
    for (std::size_t i = 0; i < k; ++i) put_vector(out, "trans." + std::to_string(i + 1), p.trans.row(i));
    put_vector(out, "init_dist", p.init_dist);
    if (doc.loglik) out << "loglik " << text::format_17g(*doc.loglik) << '\n';
    if (doc.diagnostics) {
        const FitDiagnostics& d = *doc.diagnostics;
        out << "converged " << (d.converged ? 1 : 0) << '\n';
        out << "best_restart " << d.best_restart + 1 << '\n';
        for (std::size_t r = 0; r < d.restarts.size(); ++r) {
            const RestartDiagnostics& rd = d.restarts[r];
            out << "restart." << r + 1 << " loglik=" << text::format_17g(rd.loglik)
                << " iterations=" << rd.iterations << " converged=" << (rd.converged ? 1 : 0)
                << " status=" << (rd.failed ? "failed" : "ok") << '\n';
        }
    }
}

ModelDocument read_model(std::istream& in) {
    ModelDocument doc;
    std::string line;
    std::size_t k = 0;
    std::map<std::size_t, std::vector<double>> trans_rows;
    std::map<std::size_t, RestartDiagnostics> restarts;
    bool have_diag = false;
    FitDiagnostics diag;

    while (std::getline(in, line)) {
        std::string_view view = text::trim(line);
        if (view.empty()) continue;
        if (view.front() == '#') {
            view = text::trim(view.substr(1));
            const auto eq = view.find('=');
            if (eq != std::string_view::npos) {
                doc.meta.emplace_back(std::string(text::trim(view.substr(0, eq))),
                                      std::string(text::trim(view.substr(eq + 1))));
            }
            continue;
        }
        const auto toks = text::tokens(view);
        const std::string_view key = toks.front();
        if (key == "states") {
            if (toks.size() != 2) throw text::ParseError("model: 'states' takes one value");
            k = static_cast<std::size_t>(text::parse_int(toks[1], "states"));
        } else if (key == "alpha") {
            doc.params.alpha = get_vector(toks, key);
        } else if (key == "beta_lag") {
            doc.params.beta_lag = get_vector(toks, key);
        } else if (key == "beta_dbam") {
            doc.params.beta_dbam = get_vector(toks, key);
        } else if (key == "sigma") {
            doc.params.sigma = get_vector(toks, key);
        } else if (key == "init_dist") {
            doc.params.init_dist = get_vector(toks, key);
        } else if (key.starts_with("trans.")) {
            const auto row = static_cast<std::size_t>(text::parse_int(key.substr(6), "trans row"));
            trans_rows[row] = get_vector(toks, key);
        } else if (key == "loglik") {
            doc.loglik = text::parse_double(toks.at(1), key);
        } else if (key == "converged") {
            have_diag = true;
            diag.converged = text::parse_int(toks.at(1), key) != 0;
        } else if (key == "best_restart") {
            have_diag = true;
            diag.best_restart = static_cast<std::size_t>(text::parse_int(toks.at(1), key) - 1);
        } else if (key.starts_with("restart.")) {
            have_diag = true;
            const auto idx = static_cast<std::size_t>(text::parse_int(key.substr(8), "restart index"));
            RestartDiagnostics rd;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                const auto eq = toks[i].find('=');
                if (eq == std::string_view::npos) continue;
                const std::string_view name = toks[i].substr(0, eq);
                const std::string_view value = toks[i].substr(eq + 1);
                if (name == "loglik") rd.loglik = text::parse_double(value, "restart loglik");
                else if (name == "iterations") rd.iterations = static_cast<int>(text::parse_int(value, name));
                else if (name == "converged") rd.converged = value == "1";
                else if (name == "status") rd.failed = value == "failed";
            }
            restarts[idx] = rd;
        } else {
            throw text::ParseError("model: unknown key '" + std::string(key) + "'");
        }
    }

    if (k == 0) throw text::ParseError("model: missing 'states'");
    doc.params.trans = Matrix(k, k);
    for (std::size_t i = 1; i <= k; ++i) {
        auto it = trans_rows.find(i);
        if (it == trans_rows.end() || it->second.size() != k) {
            throw text::ParseError("model: transition row " + std::to_string(i) + " missing or wrong length");
        }
        std::copy(it->second.begin(), it->second.end(), doc.params.trans.row(i - 1).begin());
    }
    if (have_diag) {
        for (auto& [idx, rd] : restarts) diag.restarts.push_back(rd);
        doc.diagnostics = std::move(diag);
    }
    validate(doc.params);
    return doc;
}

}  // namespace liqregime::regime
