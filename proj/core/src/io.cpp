#include "qwalk2d/io.hpp"

#include "qwalk2d/errors.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace qwalk {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

std::string pair_json(double re, double im) {
    return "[" + fmt17(re) + ", " + fmt17(im) + "]";
}

std::string coin_json(const CoinParameters& coin) {
    std::string s = "{";
    s += "\"a\": " + pair_json(coin.a.real(), coin.a.imag());
    s += ", \"b\": " + pair_json(coin.b.real(), coin.b.imag());
    s += ", \"c\": " + pair_json(coin.c.real(), coin.c.imag());
    s += ", \"d\": " + pair_json(coin.d.real(), coin.d.imag());
    s += ", \"delta\": " + pair_json(coin.delta.real(), coin.delta.imag());
    s += "}";
    return s;
}

std::string phi_json(const InitialState& phi) {
    std::string s = "[";
    for (int i = 0; i < 4; ++i) {
        if (i) s += ", ";
        s += pair_json(phi[i].real(), phi[i].imag());
    }
    return s + "]";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError(std::string("bad ") + what + " value '" + s + "'");
    return v;
}

long parse_int(const std::string& s, const char* what) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError(std::string("bad ") + what + " value '" + s + "'");
    return v;
}

} // namespace

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* const kEntropySeriesHeader =
    "n,s_c,s_shannon,s_L,s_R,s_D,s_U,eig1,eig2,eig3,eig4,normL,normR,normD,normU";

void write_entropy_series_csv(std::ostream& out, const std::vector<EntropyRecord>& rows) {
    out << kEntropySeriesHeader << "\n";
    for (const EntropyRecord& r : rows) {
        out << r.n << ',' << fmt17(r.s_c) << ',' << fmt17(r.s_shannon);
        for (double v : r.s_comp) out << ',' << fmt17(v);
        for (double v : r.eig) out << ',' << fmt17(v);
        for (double v : r.norm) out << ',' << fmt17(v);
        out << "\n";
    }
}

std::vector<EntropyRecord> read_entropy_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != split_csv(kEntropySeriesHeader))
        throw ConfigError("entropy series header mismatch");

    std::vector<EntropyRecord> rows;
    int prev_n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 15) throw ConfigError("entropy series row with " +
                                              std::to_string(f.size()) + " fields");
        EntropyRecord r;
        r.n = static_cast<int>(parse_int(f[0], "n"));
        r.s_c = parse_num(f[1], "s_c");
        r.s_shannon = parse_num(f[2], "s_shannon");
        for (int i = 0; i < 4; ++i) r.s_comp[static_cast<std::size_t>(i)] = parse_num(f[static_cast<std::size_t>(3 + i)], "s_comp");
        for (int i = 0; i < 4; ++i) r.eig[static_cast<std::size_t>(i)] = parse_num(f[static_cast<std::size_t>(7 + i)], "eig");
        for (int i = 0; i < 4; ++i) r.norm[static_cast<std::size_t>(i)] = parse_num(f[static_cast<std::size_t>(11 + i)], "norm");

        if (r.n <= prev_n) throw ConfigError("n not strictly increasing at row n = " +
                                             std::to_string(r.n));
        prev_n = r.n;
        if (r.s_c < -1e-12 || r.s_c > 2.0 + 1e-9)
            throw ConfigError("s_c out of [0, 2] at n = " + std::to_string(r.n));
        double eig_sum = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double e = r.eig[static_cast<std::size_t>(i)];
            if (e < -1e-10 || e > 1.0 + 1e-10)
                throw ConfigError("eigenvalue out of range at n = " + std::to_string(r.n));
            if (i && e > r.eig[static_cast<std::size_t>(i - 1)] + 1e-12)
                throw ConfigError("eigenvalues not descending at n = " + std::to_string(r.n));
            eig_sum += e;
        }
        if (std::abs(eig_sum - 1.0) > 1e-8)
            throw ConfigError("eigenvalues sum to " + fmt17(eig_sum) + " at n = " +
                              std::to_string(r.n));
        double norm_sum = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double nv = r.norm[static_cast<std::size_t>(i)];
            const double sv = r.s_comp[static_cast<std::size_t>(i)];
            if (nv < -1e-12 || nv > 1.0 + 1e-10)
                throw ConfigError("component norm out of range at n = " + std::to_string(r.n));
            if (std::isnan(sv)) {
                if (nv >= 1e-14)
                    throw ConfigError("NaN entropy for populated component at n = " +
                                      std::to_string(r.n));
            } else if (sv < -1e-12) {
                throw ConfigError("negative component entropy at n = " + std::to_string(r.n));
            }
            norm_sum += nv;
        }
        if (std::abs(norm_sum - 1.0) > 1e-8)
            throw ConfigError("component norms sum to " + fmt17(norm_sum) + " at n = " +
                              std::to_string(r.n));
        rows.push_back(r);
    }
    return rows;
}

void write_distribution_csv(std::ostream& out, const ProbabilityGrid& grid) {
    out << "x,y,p\n";
    const int n = grid.n;
    for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y) {
            if ((x + y + n) % 2 != 0) continue;
            out << x << ',' << y << ',' << fmt17(grid.at(x, y)) << "\n";
        }
}

ProbabilityGrid read_distribution_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != split_csv("x,y,p"))
        throw ConfigError("distribution header mismatch");

    struct Row {
        int x, y;
        double p;
    };
    std::vector<Row> rows;
    int n = 0;
    double mass = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 3) throw ConfigError("distribution row with " +
                                             std::to_string(f.size()) + " fields");
        Row r;
        r.x = static_cast<int>(parse_int(f[0], "x"));
        r.y = static_cast<int>(parse_int(f[1], "y"));
        r.p = parse_num(f[2], "p");
        if (r.p < -1e-15 || r.p > 1.0 + 1e-12)
            throw ConfigError("probability out of range at (" + std::to_string(r.x) + ", " +
                              std::to_string(r.y) + ")");
        n = std::max(n, std::max(std::abs(r.x), std::abs(r.y)));
        mass += r.p;
        rows.push_back(r);
    }
    if (std::abs(mass - 1.0) > 1e-8)
        throw ConfigError("distribution mass is " + fmt17(mass));
    const std::size_t side = 2 * static_cast<std::size_t>(n) + 1;
    ProbabilityGrid grid{n, std::vector<double>(side * side, 0.0)};
    for (const Row& r : rows) {
        if (((r.x + r.y + n) % 2 + 2) % 2 != 0)
            throw ConfigError("site (" + std::to_string(r.x) + ", " + std::to_string(r.y) +
                              ") violates parity for n = " + std::to_string(n));
        grid.p[static_cast<std::size_t>(r.x + n) * side + static_cast<std::size_t>(r.y + n)] =
            r.p;
    }
    return grid;
}

void write_field_csv(std::ostream& out, const FieldView& field) {
    out << "x,y,reL,imL,reR,imR,reD,imD,reU,imU\n";
    const int n = field.n;
    for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y) {
            if (((x + y + n) % 2 + 2) % 2 != 0) continue;
            out << x << ',' << y;
            if (std::abs(x) + std::abs(y) <= n) {
                const cplx* a = field.at(x, y);
                for (int c = 0; c < 4; ++c)
                    out << ',' << fmt17(a[c].real()) << ',' << fmt17(a[c].imag());
            } else {
                for (int c = 0; c < 8; ++c) out << ",0";
            }
            out << "\n";
        }
}

AmplitudeField read_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        split_csv(line) != split_csv("x,y,reL,imL,reR,imR,reD,imD,reU,imU"))
        throw ConfigError("field snapshot header mismatch");

    struct Row {
        int x, y;
        std::array<cplx, 4> a;
    };
    std::vector<Row> rows;
    int n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 10) throw ConfigError("field row with " + std::to_string(f.size()) +
                                              " fields");
        Row r;
        r.x = static_cast<int>(parse_int(f[0], "x"));
        r.y = static_cast<int>(parse_int(f[1], "y"));
        for (int c = 0; c < 4; ++c)
            r.a[static_cast<std::size_t>(c)] = {parse_num(f[static_cast<std::size_t>(2 + 2 * c)], "re"),
                                                parse_num(f[static_cast<std::size_t>(3 + 2 * c)], "im")};
        n = std::max({n, std::abs(r.x), std::abs(r.y)});
        rows.push_back(r);
    }
    // All listed sites must share the parity class fixed by the extent.
    AmplitudeField field(n);
    for (const Row& r : rows) {
        if (((r.x + r.y + n) % 2 + 2) % 2 != 0)
            throw ConfigError("site (" + std::to_string(r.x) + ", " + std::to_string(r.y) +
                              ") violates parity for n = " + std::to_string(n));
        if (std::abs(r.x) + std::abs(r.y) > n) continue; // zero padding rows
        cplx* o = field.at(r.x, r.y);
        for (int c = 0; c < 4; ++c) o[c] = r.a[static_cast<std::size_t>(c)];
    }
    return field;
}

std::string field_sidecar_json(const FieldView& field, const CoinParameters& coin,
                               const InitialState& phi) {
    std::string s = "{\n";
    s += "  \"n\": " + std::to_string(field.n) + ",\n";
    s += "  \"coin\": " + coin_json(coin) + ",\n";
    s += "  \"phi\": " + phi_json(phi) + ",\n";
    double norm = 0.0;
    for (int x = -field.n; x <= field.n; ++x) {
        const int ylim = field.n - std::abs(x);
        for (int y = -ylim; y <= ylim; y += 2) {
            const cplx* a = field.at(x, y);
            norm += std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]) + std::norm(a[3]);
        }
    }
    s += "  \"norm\": " + fmt17(norm) + "\n";
    s += "}\n";
    return s;
}

void write_classical_csv(std::ostream& out, const ClassicalReport& report) {
    out << "n,s_rw,ratio1,bracket2\n";
    for (const ClassicalRow& r : report.rows)
        out << r.n << ',' << fmt17(r.s_rw) << ',' << fmt17(r.ratio1) << ','
            << fmt17(r.bracket2) << "\n";
}

ClassicalReport read_classical_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != split_csv("n,s_rw,ratio1,bracket2"))
        throw ConfigError("classical header mismatch");
    ClassicalReport rep;
    rep.half_log_2pie = 0.0;
    rep.ratio_monotone_decreasing = true;
    std::int64_t prev = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 4) throw ConfigError("classical row with " + std::to_string(f.size()) +
                                             " fields");
        ClassicalRow r;
        r.n = parse_int(f[0], "n");
        r.s_rw = parse_num(f[1], "s_rw");
        r.ratio1 = parse_num(f[2], "ratio1");
        r.bracket2 = parse_num(f[3], "bracket2");
        if (r.n <= prev) throw ConfigError("n not increasing in classical rows");
        if (r.s_rw < 0) throw ConfigError("negative entropy in classical rows");
        prev = r.n;
        if (!rep.rows.empty() && r.ratio1 >= rep.rows.back().ratio1)
            rep.ratio_monotone_decreasing = false;
        rep.rows.push_back(r);
    }
    if (rep.rows.empty()) throw ConfigError("classical table has no rows");
    rep.measured_bracket = rep.rows.back().bracket2;
    rep.ratio_at_nmax = rep.rows.back().ratio1;
    return rep;
}

std::string classical_summary_json(const ClassicalReport& report) {
    std::string s = "{\n";
    s += "  \"claimed_constant\": " + fmt17(report.half_log_2pie) + ",\n";
    s += "  \"measured_bracket\": " + fmt17(report.measured_bracket) + ",\n";
    s += "  \"offset_to_claimed\": " + fmt17(report.half_log_2pie - report.measured_bracket) +
         ",\n";
    s += "  \"ratio_at_nmax\": " + fmt17(report.ratio_at_nmax) + ",\n";
    s += std::string("  \"ratio_monotone_decreasing\": ") +
         (report.ratio_monotone_decreasing ? "true" : "false") + "\n";
    s += "}\n";
    return s;
}

std::string limit_report_json(const LimitReport& report) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"coin\": " << coin_json(report.coin) << ",\n";
    os << "  \"phi\": " << phi_json(report.phi) << ",\n";

    auto quad = [&](const char* key, const std::array<double, 4>& v) {
        os << "  \"" << key << "\": [" << fmt17(v[0]) << ", " << fmt17(v[1]) << ", "
           << fmt17(v[2]) << ", " << fmt17(v[3]) << "],\n";
    };
    quad("overlaps_quadrature", report.overlaps_quadrature);
    quad("overlaps_empirical", report.overlaps_empirical);

    os << "  \"cross_overlaps_empirical\": [";
    for (int i = 0; i < 6; ++i) {
        if (i) os << ", ";
        os << pair_json(report.cross_overlaps_empirical[static_cast<std::size_t>(i)][0],
                        report.cross_overlaps_empirical[static_cast<std::size_t>(i)][1]);
    }
    os << "],\n";

    os << "  \"s_limit_quadrature\": "
       << (report.s_limit_quadrature ? fmt17(*report.s_limit_quadrature) : "null") << ",\n";
    os << "  \"s_limit_empirical\": " << fmt17(report.s_limit_empirical) << ",\n";
    os << "  \"shannon_fit\": {\"slope\": " << fmt17(report.shannon_fit.slope)
       << ", \"intercept\": " << fmt17(report.shannon_fit.intercept)
       << ", \"r2\": " << fmt17(report.shannon_fit.r2) << "},\n";
    os << "  \"corrections\": {\"L\": " << fmt17(report.corrections[0])
       << ", \"R\": " << fmt17(report.corrections[1])
       << ", \"D\": " << fmt17(report.corrections[2])
       << ", \"U\": " << fmt17(report.corrections[3])
       << ", \"total\": " << fmt17(report.corrections[4]) << "},\n";
    os << "  \"transcription_id\": \"" << json_escape(report.transcription_id) << "\",\n";

    os << "  \"discrepancies\": [";
    for (std::size_t i = 0; i < report.discrepancies.size(); ++i) {
        const Discrepancy& d = report.discrepancies[i];
        os << (i ? ",\n    " : "\n    ");
        os << "{\"id\": \"" << json_escape(d.id) << "\", \"value\": "
           << (d.value ? fmt17(*d.value) : "null") << ", \"note\": \"" << json_escape(d.note)
           << "\"}";
    }
    os << (report.discrepancies.empty() ? "]\n" : "\n  ]\n");
    os << "}\n";
    return os.str();
}

std::string series_dat(const std::vector<double>& series) {
    std::string s = "# n value\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        s += std::to_string(i + 1) + " " + fmt17(series[i]) + "\n";
    return s;
}

std::string shannon_ratio_dat(const std::vector<double>& shannon_series) {
    // ratio to the claimed leading term log2(n / 4); defined from n = 5 on
    std::string s = "# n shannon/log2(n/4)\n";
    for (std::size_t i = 4; i < shannon_series.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        s += std::to_string(i + 1) + " " + fmt17(shannon_series[i] / std::log2(n / 4.0)) + "\n";
    }
    return s;
}

std::string plot_script(const std::string& sc_file, const std::string& ratio_file) {
    std::string s;
    s += "set terminal pngcairo size 900,600\n";
    s += "set grid\n";
    s += "set xlabel 'n'\n";
    s += "set output 'entanglement.png'\n";
    s += "set ylabel 'S_n^c (bits)'\n";
    s += "plot '" + sc_file + "' using 1:2 with lines title 'coin-position entanglement'\n";
    s += "set output 'shannon_ratio.png'\n";
    s += "set ylabel 'S_n / log2(n/4)'\n";
    s += "plot '" + ratio_file + "' using 1:2 with lines title 'shannon ratio'\n";
    return s;
}

} // namespace qwalk
