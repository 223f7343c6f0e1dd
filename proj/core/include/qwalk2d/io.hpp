#pragma once

#include "qwalk2d/asymptotics.hpp"
#include "qwalk2d/classical.hpp"
#include "qwalk2d/coin.hpp"
#include "qwalk2d/evolution.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qwalk {

/// Shortest round-trip decimal form of a double (%.17g). All emitted numbers
/// go through this, which together with fixed reduction trees makes every
/// output byte-reproducible.
std::string fmt17(double v);

/// One row of the entropy series CSV. Component entropies of empty
/// components are NaN (emitted as "nan").
struct EntropyRecord {
    int n;
    double s_c;
    double s_shannon;
    std::array<double, 4> s_comp; // L, R, D, U
    std::array<double, 4> eig;    // descending coin-density spectrum
    std::array<double, 4> norm;   // component norms
};

extern const char* const kEntropySeriesHeader;
// "n,s_c,s_shannon,s_L,s_R,s_D,s_U,eig1,eig2,eig3,eig4,normL,normR,normD,normU"

void write_entropy_series_csv(std::ostream& out, const std::vector<EntropyRecord>& rows);

/// Parses and re-validates an emitted series file: header must match, n
/// strictly increasing, eigenvalues a descending spectrum summing to ~1,
/// entropies within bounds, NaN component entropies only where the norm
/// vanishes. Throws ConfigError on any violation.
std::vector<EntropyRecord> read_entropy_series_csv(std::istream& in);

/// x,y,p rows over parity-valid sites.
void write_distribution_csv(std::ostream& out, const ProbabilityGrid& grid);

/// Reloads a distribution snapshot; validates the header, site parity,
/// p >= 0 and total mass 1 within 1e-8. Throws ConfigError on violations.
ProbabilityGrid read_distribution_csv(std::istream& in);

/// x,y,reL,imL,reR,imR,reD,imD,reU,imU rows over parity-valid sites.
void write_field_csv(std::ostream& out, const FieldView& field);

/// Round-trips a field snapshot; grid size from the header-implied n.
/// Throws ConfigError on malformed rows or parity violations.
AmplitudeField read_field_csv(std::istream& in);

/// Sidecar for a field snapshot.
std::string field_sidecar_json(const FieldView& field, const CoinParameters& coin,
                               const InitialState& phi);

/// n,s_rw,ratio1,bracket2 rows.
void write_classical_csv(std::ostream& out, const ClassicalReport& report);
ClassicalReport read_classical_csv(std::istream& in);

/// Summary JSON for the baseline command.
std::string classical_summary_json(const ClassicalReport& report);

/// The limits report, serialized with a fixed key order.
std::string limit_report_json(const LimitReport& report);

/// Plot-ready two-column files: n vs entanglement entropy, and n vs the
/// ratio of the Shannon entropy to the claimed leading term log2(n / 4).
std::string series_dat(const std::vector<double>& series);
std::string shannon_ratio_dat(const std::vector<double>& shannon_series);

/// Gnuplot script rendering both .dat files.
std::string plot_script(const std::string& sc_file, const std::string& ratio_file);

} // namespace qwalk
