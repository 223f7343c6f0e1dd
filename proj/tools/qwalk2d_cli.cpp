// Command-line front end: parses a JSON run config, executes one of the
// pipelines and writes CSV/JSON/plot artifacts. Exit codes: 0 ok, 2 config
// parse or validation failure, 3 resource cap, 4 degenerate coin.
#include "qwalk2d/asymptotics.hpp"
#include "qwalk2d/classical.hpp"
#include "qwalk2d/coin.hpp"
#include "qwalk2d/entropy.hpp"
#include "qwalk2d/errors.hpp"
#include "qwalk2d/evolution.hpp"
#include "qwalk2d/hermitian.hpp"
#include "qwalk2d/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct RunConfig {
    qwalk::CoinParameters coin;
    qwalk::InitialState phi;
    int n_max = 512;
    int quadrature_n = 512;
    double window = 0.5;
    std::vector<int> snapshots;
    int threads = 1;
    std::size_t memory_cap_bytes = std::size_t{4} << 30;
    bool fejer_check = false;
};

qwalk::cplx complex_field(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw qwalk::ConfigError("field '" + field + "' must be a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qwalk::ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw qwalk::ConfigError(std::string("config parse: ") + e.what());
    }

    RunConfig cfg;
    if (!j.contains("coin")) throw qwalk::ConfigError("missing field 'coin'");
    const json& jc = j["coin"];
    if (jc.contains("theta")) {
        if (!jc["theta"].is_number())
            throw qwalk::ConfigError("field 'coin.theta' must be a number");
        cfg.coin = qwalk::coin_from_angle(jc["theta"].get<double>());
    } else if (jc.contains("a") && jc.contains("b") && jc.contains("delta")) {
        cfg.coin = qwalk::build_coin(complex_field(jc["a"], "coin.a"),
                                     complex_field(jc["b"], "coin.b"),
                                     complex_field(jc["delta"], "coin.delta"));
    } else {
        throw qwalk::ConfigError("field 'coin' needs either 'theta' or 'a'/'b'/'delta'");
    }

    if (!j.contains("phi") || !j["phi"].is_array() || j["phi"].size() != 4)
        throw qwalk::ConfigError("field 'phi' must be an array of 4 [re, im] pairs");
    std::array<qwalk::cplx, 4> p;
    for (int i = 0; i < 4; ++i)
        p[static_cast<std::size_t>(i)] =
            complex_field(j["phi"][static_cast<std::size_t>(i)], "phi");
    cfg.phi = qwalk::make_initial_state(p[0], p[1], p[2], p[3]);

    auto get_int = [&](const char* key, int fallback, int lo) {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_number_integer())
            throw qwalk::ConfigError(std::string("field '") + key + "' must be an integer");
        const int v = j[key].get<int>();
        if (v < lo)
            throw qwalk::ConfigError(std::string("field '") + key + "' must be >= " +
                                     std::to_string(lo));
        return v;
    };
    cfg.n_max = get_int("n_max", cfg.n_max, 1);
    cfg.quadrature_n = get_int("quadrature_n", cfg.quadrature_n, 8);
    cfg.threads = get_int("threads", cfg.threads, 1);
    cfg.memory_cap_bytes =
        static_cast<std::size_t>(get_int("memory_cap_mb", 4096, 1)) << 20;

    if (j.contains("window")) {
        if (!j["window"].is_number())
            throw qwalk::ConfigError("field 'window' must be a number");
        cfg.window = j["window"].get<double>();
        if (!(cfg.window > 0.0 && cfg.window <= 1.0))
            throw qwalk::ConfigError("field 'window' must lie in (0, 1]");
    }
    if (j.contains("fejer_check")) {
        if (!j["fejer_check"].is_boolean())
            throw qwalk::ConfigError("field 'fejer_check' must be a boolean");
        cfg.fejer_check = j["fejer_check"].get<bool>();
    }
    if (j.contains("snapshots")) {
        if (!j["snapshots"].is_array())
            throw qwalk::ConfigError("field 'snapshots' must be an array of integers");
        for (const json& v : j["snapshots"]) {
            if (!v.is_number_integer())
                throw qwalk::ConfigError("field 'snapshots' must be an array of integers");
            cfg.snapshots.push_back(v.get<int>());
        }
    }
    return cfg;
}

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw qwalk::ConfigError("cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw qwalk::ConfigError("short write on '" + p.string() + "'");
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw qwalk::ConfigError("cannot create output directory '" + out + "': " +
                                 ec.message());
    return dir;
}

int run_simulate(const RunConfig& cfg, const fs::path& dir) {
    std::set<int> snaps(cfg.snapshots.begin(), cfg.snapshots.end());
    if (snaps.empty()) snaps.insert(cfg.n_max);
    for (int s : snaps)
        if (s < 1 || s > cfg.n_max)
            throw qwalk::ConfigError("snapshot time " + std::to_string(s) +
                                     " outside [1, n_max]");

    qwalk::EvolveOptions eo;
    eo.threads = cfg.threads;
    eo.memory_cap_bytes = cfg.memory_cap_bytes;
    qwalk::Walker walker(cfg.coin, cfg.phi, cfg.n_max, eo);

    std::string norm_log = "n,norm\n";
    for (int n = 1; n <= cfg.n_max; ++n) {
        walker.advance();
        qwalk::AmplitudeField field = walker.snapshot();
        norm_log += std::to_string(n) + "," + qwalk::fmt17(field.norm_sq()) + "\n";
        if (!snaps.count(n)) continue;

        const std::string tag = "_n" + std::to_string(n);
        std::ostringstream dist;
        qwalk::write_distribution_csv(dist, qwalk::distribution(field));
        {
            std::istringstream back(dist.str());
            qwalk::read_distribution_csv(back);
        }
        write_file(dir, "distribution" + tag + ".csv", dist.str());

        std::ostringstream fld;
        qwalk::write_field_csv(fld, field);
        {
            std::istringstream back(fld.str());
            qwalk::read_field_csv(back);
        }
        write_file(dir, "field" + tag + ".csv", fld.str());
        write_file(dir, "field" + tag + ".json",
                   qwalk::field_sidecar_json(field, cfg.coin, cfg.phi));
    }
    write_file(dir, "norm_log.csv", norm_log);
    return 0;
}

int run_entropy_series(const RunConfig& cfg, const fs::path& dir) {
    qwalk::EvolveOptions eo;
    eo.threads = cfg.threads;
    eo.memory_cap_bytes = cfg.memory_cap_bytes;
    qwalk::Walker walker(cfg.coin, cfg.phi, cfg.n_max, eo);

    std::vector<qwalk::EntropyRecord> rows;
    rows.reserve(static_cast<std::size_t>(cfg.n_max));
    for (int n = 1; n <= cfg.n_max; ++n) {
        walker.advance();
        const qwalk::FieldView field = walker.field();
        const qwalk::Mat4 rho = qwalk::coin_density(field, cfg.threads);
        qwalk::EntropyRecord rec;
        rec.n = n;
        rec.eig = qwalk::hermitian_eigenvalues(rho);
        rec.s_c = qwalk::von_neumann_entropy(rec.eig);
        rec.s_shannon = qwalk::shannon_entropy(qwalk::distribution(field), cfg.threads);
        const qwalk::ComponentStats stats = qwalk::component_entropies(field);
        rec.s_comp = stats.entropy;
        rec.norm = stats.norm;
        rows.push_back(rec);
    }

    std::ostringstream csv;
    qwalk::write_entropy_series_csv(csv, rows);
    {
        std::istringstream back(csv.str());
        qwalk::read_entropy_series_csv(back);
    }
    write_file(dir, "series.csv", csv.str());
    return 0;
}

int run_limits(const RunConfig& cfg, const fs::path& dir) {
    if (qwalk::is_degenerate(cfg.coin))
        throw qwalk::DegenerateCoin(
            "the limiting analysis assumes a, b, c, d all nonzero; this coin violates "
            "that hypothesis");

    qwalk::ReportOptions opts;
    opts.n_max = cfg.n_max;
    opts.quad_n = cfg.quadrature_n;
    opts.window = cfg.window;
    opts.threads = cfg.threads;
    opts.memory_cap_bytes = cfg.memory_cap_bytes;
    opts.fejer_check = cfg.fejer_check;
    const qwalk::LimitReport rep = qwalk::build_limit_report(cfg.coin, cfg.phi, opts);

    write_file(dir, "limit_report.json", qwalk::limit_report_json(rep));
    write_file(dir, "sc_series.dat", qwalk::series_dat(rep.entanglement_series));
    write_file(dir, "shannon_ratio.dat", qwalk::shannon_ratio_dat(rep.shannon_series));
    write_file(dir, "plot.gp", qwalk::plot_script("sc_series.dat", "shannon_ratio.dat"));
    return 0;
}

int run_baseline(std::int64_t n_max, const fs::path& dir) {
    const qwalk::ClassicalReport rep = qwalk::rw_limit_report(n_max);
    std::ostringstream csv;
    qwalk::write_classical_csv(csv, rep);
    {
        std::istringstream back(csv.str());
        qwalk::read_classical_csv(back);
    }
    write_file(dir, "classical.csv", csv.str());
    write_file(dir, "classical_summary.json", qwalk::classical_summary_json(rep));
    return 0;
}

// Path-sum equivalence suite: 10 sampled (coin, phi), horizons cycling
// through 1..6, compared site by site in probability. The generator maps raw
// mt19937 draws through ldexp so the sampled values are identical on every
// platform.
int run_oracle_check() {
    std::mt19937 rng(871226u);
    auto unif = [&rng]() { return std::ldexp(static_cast<double>(rng()), -32); };

    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double r = 0.15 + 0.7 * unif();
        const qwalk::CoinParameters coin = qwalk::build_coin(
            std::polar(r, 2 * std::numbers::pi * unif()),
            std::polar(std::sqrt(1.0 - r * r), 2 * std::numbers::pi * unif()),
            std::polar(1.0, 2 * std::numbers::pi * unif()));

        std::array<qwalk::cplx, 4> raw;
        double norm = 0.0;
        for (auto& c : raw) {
            c = {2 * unif() - 1, 2 * unif() - 1};
            norm += std::norm(c);
        }
        const double scale = 1.0 / std::sqrt(norm);
        const qwalk::InitialState phi = qwalk::make_initial_state(
            scale * raw[0], scale * raw[1], scale * raw[2], scale * raw[3]);

        const int n = 1 + trial % 6;
        const qwalk::AmplitudeField direct = qwalk::evolve(coin, phi, n);
        const qwalk::AmplitudeField summed = qwalk::path_sum_oracle(coin, n).field(phi);
        for (int x = -n; x <= n; ++x)
            for (int y = -(n - std::abs(x)); y <= n - std::abs(x); y += 2) {
                double pd = 0.0, ps = 0.0;
                for (int c = 0; c < 4; ++c) {
                    pd += std::norm(direct.at(x, y)[c]);
                    ps += std::norm(summed.at(x, y)[c]);
                }
                worst = std::max(worst, std::abs(pd - ps));
            }
    }
    std::printf("oracle-check: max per-site probability deviation %.3e over 10 cases, n <= 6\n",
                worst);
    return worst < 1e-12 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D quantum walk simulator and entropy asymptotics toolkit"};
    app.require_subcommand(1);

    std::string config_path, out = ".";
    int threads = 0;   // 0: take the config value
    int nmax = 0;      // 0: take the config value

    CLI::App* sim = app.add_subcommand("simulate", "evolve and write field snapshots");
    CLI::App* ser = app.add_subcommand("entropy-series",
                                       "entropy record per step up to n_max");
    CLI::App* lim = app.add_subcommand("limits", "limit report with dual-path diagnostics");
    CLI::App* base = app.add_subcommand("baseline", "classical random walk entropy table");
    CLI::App* orc = app.add_subcommand("oracle-check",
                                       "path-sum equivalence suite at small n");

    for (CLI::App* cmd : {sim, ser, lim}) {
        cmd->add_option("--config", config_path, "JSON run config")->required();
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--threads", threads, "worker thread cap");
        cmd->add_option("--nmax", nmax, "override n_max from the config");
    }
    base->add_option("--out", out, "output directory");
    base->add_option("--nmax", nmax, "largest classical horizon (default 65536)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (orc->parsed()) return run_oracle_check();

        const fs::path dir = prepare_out_dir(out);
        if (base->parsed()) return run_baseline(nmax > 0 ? nmax : (1 << 16), dir);

        RunConfig cfg = load_config(config_path);
        if (threads > 0) cfg.threads = threads;
        if (nmax > 0) cfg.n_max = nmax;

        if (sim->parsed()) return run_simulate(cfg, dir);
        if (ser->parsed()) return run_entropy_series(cfg, dir);
        return run_limits(cfg, dir);
    } catch (const qwalk::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        const std::string kind = e.kind();
        if (kind == "ResourceLimit") return 3;
        if (kind == "DegenerateCoin") return 4;
        if (kind == "EmptyComponent" || kind == "NotFactorable" ||
            kind == "CalibrationFailed" || kind == "BadSpectrum")
            return 1;
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
