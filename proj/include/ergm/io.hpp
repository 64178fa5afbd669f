#ifndef ERGM_IO_HPP
#define ERGM_IO_HPP

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ergm/estimate.hpp"
#include "ergm/mask.hpp"

namespace ergm {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);
double parse_double(const std::string& s);
/// 15 significant digits, for tables meant to be read by people and plots.
std::string format_display(double x);

/// Graph text: `n <N>` then one `<i> <j>` per line (1-based), networks
/// separated by `---`, '#' comments.
std::vector<Graph> read_graphs(std::istream& in);
void write_graphs(std::ostream& out, std::span<const Graph> graphs);

/// One line per unobserved dyad (1-based), masks separated by `---`. A
/// comment of the form `# design <kind> ignorable=<yes|no>` tags the file.
struct MaskFile {
    std::vector<ObservationMask> masks;
    std::string design;
    bool ignorable = true;
};
/// `sizes` gives the node count of each network in order; a single mask is
/// reused for every network of that size.
MaskFile read_masks(std::istream& in, std::span<const int> sizes);
void write_masks(std::ostream& out, const MaskFile& file);

/// Header row of attribute names, then one row per node. Columns whose values
/// all parse as numbers are real; repeated names stack into one vector
/// attribute (e.g. three `pos` columns for 3-d coordinates).
NodeAttributes read_attributes(std::istream& in);
void write_attributes(std::ostream& out, const NodeAttributes& attrs);

/// Whitespace-separated theta vectors, one per line.
std::vector<ThetaVector> read_grid(std::istream& in);

/// Ordered `key<TAB>value` lines.
using Report = std::vector<std::pair<std::string, std::string>>;
void write_report(std::ostream& out, const Report& r);
Report read_report(std::istream& in);
const std::string& report_value(const Report& r, const std::string& key);

Report fit_report(const FitResult& f);
/// Recovers theta_hat, names, standard errors, method and chain settings.
FitResult fit_from_report(const Report& r);
/// `name<TAB>estimate<TAB>se` rows under a header.
void write_parameter_table(std::ostream& out, const FitResult& f);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace ergm

#endif  // ERGM_IO_HPP
