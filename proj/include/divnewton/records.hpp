#pragma once
/**
 * Text formats for trajectories, alpha logs, grid layers and curves.
 *
 * Floats are written with 17 significant digits so that files round-trip
 * exactly and repeated runs are byte-identical.
 *
 * Trajectory record, one line per run:
 *   run=0 function=Rosenbrock-wide strategy=Szzp-Mlm-Ctau outcome=minimum degenerate=0
 *   steps=7 grad_norm=... ids=D-,^v,... start=x,y final=x,y iterates=x,y;x,y;...
 *   tau_check=t0;t1;...
 *
 * Alpha log: per section a header line "section step=<k> phase=<p> chosen=<a>"
 * followed by "<alpha> <criterion>" sample lines.
 *
 * Grid layer: header "# layer=<name> nx=.. ny=.. xmin=.. xmax=.. ymin=.. ymax=..",
 * then ny rows (bottom to top) of nx values.
 *
 * Curves: header "# field=<name> curves=<k>", then per curve a line
 * "# closed=<0|1>" and one "x y singular" line per point; curves are
 * separated by a blank line.
 */

#include "divnewton/driver.hpp"
#include "divnewton/field_scanner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace divnewton {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s.empty()) {
        throw FormatError("empty number");
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw FormatError("malformed number '" + s + "'");
    }
    return v;
}

inline std::string format_point(const Point& p) {
    std::string out;
    for (int i = 0; i < p.size(); ++i) {
        if (i) out += ',';
        out += format_double(p(i));
    }
    return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        parts.push_back(cur);
    }
    if (!s.empty() && s.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

inline Point parse_point(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.empty()) {
        throw FormatError("empty point");
    }
    Point p(static_cast<int>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        p(static_cast<int>(i)) = parse_double(parts[i]);
    }
    return p;
}

inline std::vector<Point> parse_point_list(const std::string& s) {
    std::vector<Point> out;
    for (const auto& part : split(s, ';')) {
        if (!part.empty()) {
            out.push_back(parse_point(part));
        }
    }
    return out;
}

/// Splits "k1=v1 k2=v2 ..." into a map; values contain no spaces.
inline std::map<std::string, std::string> parse_fields(const std::string& line) {
    std::map<std::string, std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            throw FormatError("field without '=': " + tok);
        }
        out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return out;
}

inline std::string trajectory_line(int run_index, const std::string& function, Strategy strategy,
                                   const TrajectoryRecord& r) {
    std::string ids;
    for (std::size_t i = 0; i < r.identifiers.size(); ++i) {
        if (i) ids += ',';
        ids += r.identifiers[i];
    }
    std::string iterates;
    for (std::size_t i = 0; i < r.iterates.size(); ++i) {
        if (i) iterates += ';';
        iterates += format_point(r.iterates[i]);
    }
    std::string tc;
    for (std::size_t i = 0; i < r.tau_check.size(); ++i) {
        if (i) tc += ';';
        tc += format_double(r.tau_check[i]);
    }
    std::ostringstream out;
    out << "run=" << run_index << " function=" << function << " strategy=" << to_string(strategy)
        << " outcome=" << to_string(r.outcome)
        << " degenerate=" << (r.degenerate ? 1 : 0) << " steps=" << r.steps_taken
        << " grad_norm=" << format_double(r.final_gradient_norm) << " ids=" << (ids.empty() ? "-" : ids)
        << " start=" << format_point(r.start) << " final=" << format_point(r.final_point())
        << " iterates=" << iterates << " tau_check=" << (tc.empty() ? "-" : tc);
    return out.str();
}

/// The fields of a trajectory line needed to compare or replay a run.
struct TrajectorySummary {
    int run = 0;
    std::string function;
    std::string strategy;
    Outcome outcome = Outcome::failure;
    bool degenerate = false;
    int steps = 0;
    double grad_norm = 0.0;
    std::vector<std::string> identifiers;
    Point start;
    Point final_point;
    std::vector<Point> iterates;
};

inline Outcome parse_outcome(const std::string& s) {
    for (Outcome o : {Outcome::minimum, Outcome::maximum, Outcome::saddle, Outcome::failure}) {
        if (s == to_string(o)) {
            return o;
        }
    }
    throw FormatError("unknown outcome '" + s + "'");
}

inline TrajectorySummary parse_trajectory_line(const std::string& line) {
    const auto f = parse_fields(line);
    auto get = [&](const char* k) -> const std::string& {
        const auto it = f.find(k);
        if (it == f.end()) {
            throw FormatError(std::string("trajectory line lacks '") + k + "'");
        }
        return it->second;
    };
    TrajectorySummary s;
    s.run = std::stoi(get("run"));
    s.function = get("function");
    s.strategy = get("strategy");
    s.outcome = parse_outcome(get("outcome"));
    s.degenerate = get("degenerate") == "1";
    s.steps = std::stoi(get("steps"));
    s.grad_norm = parse_double(get("grad_norm"));
    if (get("ids") != "-") {
        s.identifiers = split(get("ids"), ',');
    }
    s.start = parse_point(get("start"));
    s.final_point = parse_point(get("final"));
    s.iterates = parse_point_list(get("iterates"));
    return s;
}

inline void write_alpha_log(std::ostream& out, const TrajectoryRecord& r) {
    for (std::size_t step = 0; step < r.sections_per_step.size(); ++step) {
        for (const auto& sec : r.sections_per_step[step]) {
            out << "section step=" << step << " phase=" << to_string(sec.phase)
                << " chosen=" << format_double(sec.chosen_alpha) << '\n';
            for (const auto& smp : sec.samples) {
                out << format_double(smp.alpha) << ' ' << format_double(smp.criterion) << '\n';
            }
        }
    }
}

inline void write_grid_layer(std::ostream& out, const FieldGrid& g, const std::string& layer) {
    const bool is_mask = layer == "mask";
    if (!is_mask && !g.layers.count(layer)) {
        throw std::invalid_argument("unknown layer '" + layer + "'");
    }
    out << "# layer=" << layer << " nx=" << g.nx << " ny=" << g.ny << " xmin=" << format_double(g.bounds.xmin)
        << " xmax=" << format_double(g.bounds.xmax) << " ymin=" << format_double(g.bounds.ymin)
        << " ymax=" << format_double(g.bounds.ymax) << '\n';
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            if (ix) out << ' ';
            if (is_mask) {
                out << (g.valid(ix, iy) ? 1 : 0);
            } else {
                out << format_double(g.at(layer, ix, iy));
            }
        }
        out << '\n';
    }
}

struct LayerFile {
    std::string layer;
    Window bounds;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;
};

inline LayerFile read_grid_layer(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# ", 0) != 0) {
        throw FormatError("grid layer: missing header");
    }
    const auto f = parse_fields(header.substr(2));
    LayerFile lf;
    try {
        lf.layer = f.at("layer");
        lf.nx = std::stoi(f.at("nx"));
        lf.ny = std::stoi(f.at("ny"));
        lf.bounds = {parse_double(f.at("xmin")), parse_double(f.at("xmax")), parse_double(f.at("ymin")),
                     parse_double(f.at("ymax"))};
    } catch (const std::out_of_range&) {
        throw FormatError("grid layer: incomplete header");
    }
    std::string tok;
    while (in >> tok) {
        lf.values.push_back(parse_double(tok));
    }
    if (lf.values.size() != static_cast<std::size_t>(lf.nx) * lf.ny) {
        throw FormatError("grid layer: value count does not match resolution");
    }
    return lf;
}

inline void write_curves(std::ostream& out, const std::vector<ZeroCurve>& curves, CurveField field) {
    out << "# field=" << to_string(field) << " curves=" << curves.size() << '\n';
    for (std::size_t c = 0; c < curves.size(); ++c) {
        if (c) out << '\n';
        out << "# closed=" << (curves[c].closed ? 1 : 0) << '\n';
        for (const auto& p : curves[c].polyline) {
            out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << (p.singular ? 1 : 0) << '\n';
        }
    }
}

inline std::vector<ZeroCurve> read_curves(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# field=", 0) != 0) {
        throw FormatError("curves: missing header");
    }
    const auto head = parse_fields(line.substr(2));
    const CurveField field =
        head.at("field") == "det_hess" ? CurveField::det_hess : CurveField::tau_minus_one;
    std::vector<ZeroCurve> curves;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.rfind("# closed=", 0) == 0) {
            curves.emplace_back();
            curves.back().field = field;
            curves.back().closed = line.substr(9) == "1";
            continue;
        }
        if (curves.empty()) {
            throw FormatError("curves: point before curve header");
        }
        std::istringstream ls(line);
        std::string xs, ys, ss;
        if (!(ls >> xs >> ys >> ss)) {
            throw FormatError("curves: malformed point line");
        }
        curves.back().polyline.push_back({parse_double(xs), parse_double(ys), ss == "1"});
    }
    if (curves.size() != std::stoul(head.at("curves"))) {
        throw FormatError("curves: count does not match header");
    }
    return curves;
}

}  // namespace divnewton
