#include "pfront/io.hpp"

#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pfront/util.hpp"

namespace pfront {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    for (std::size_t k = 0; k < header.size(); ++k)
        os << (k ? "," : "") << csv_escape(header[k]);
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_escape(row[k]);
        os << "\n";
    }
    return os.str();
}

std::string curve_csv(const SpeedCurve& curve) {
    std::vector<std::vector<std::string>> rows;
    std::string method = to_string(curve.method, curve.eps);
    for (const auto& e : curve.entries)
        rows.push_back({fmt_g17(e.angle), fmt_g17(e.c), method, fmt_g17(e.uncertainty),
                        e.ok ? "ok" : "failed: " + e.error});
    return csv_table({"angle", "c", "method", "uncertainty", "flags"}, rows);
}

std::string eigen_csv(const std::vector<EigenRow>& rows_in) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rows_in)
        rows.push_back(
            {fmt_g17(r.angle), fmt_g17(r.lambda_min), fmt_g17(r.c_lin), fmt_g17(r.mu0_residual)});
    return csv_table({"angle", "lambda_min", "c_lin", "mu0_residual"}, rows);
}

std::string approx_csv(const ApproxTable& t) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < t.n_set.size(); ++i)
        for (std::size_t j = 0; j < t.eps_list.size(); ++j) {
            const ApproxCell& c = t.cells[i][j];
            rows.push_back({fmt_g17(t.angles[i]), fmt_g17(t.eps_list[j]), fmt_g17(c.c),
                            fmt_g17(c.uncertainty), fmt_g17(t.reference[i]), t.reference_method,
                            c.ok ? "ok" : "failed: " + c.error});
        }
    return csv_table({"angle", "eps", "c", "uncertainty", "reference", "reference_method", "flags"},
                     rows);
}

std::string approx_summary_csv(const ApproxTable& t) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < t.eps_list.size(); ++j)
        rows.push_back({fmt_g17(t.eps_list[j]), fmt_g17(t.sup_gap[j])});
    return csv_table({"eps", "sup_gap"}, rows);
}

std::string trace_csv(const FrontTrace& t) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < t.times.size(); ++k)
        rows.push_back({fmt_g17(t.times[k]), fmt_g17(t.positions[k])});
    return csv_table({"t", "position"}, rows);
}

std::string profile_csv(const WaveProfile& p) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < p.z.size(); ++k)
        rows.push_back({fmt_g17(p.z[k]), fmt_g17(p.U[k])});
    return csv_table({"z", "U"}, rows);
}

std::string residual_csv(const SupersolutionReport& r) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : r.worst_slice)
        rows.push_back({fmt_g17(s[0]), fmt_g17(s[1]), fmt_g17(s[2]), fmt_g17(s[3])});
    return csv_table({"t", "x1", "x2", "residual"}, rows);
}

namespace {

std::string svg_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::string polar_svg(const SpeedCurve& curve) {
    const double W = 500.0, H = 500.0, cx = W / 2.0, cy = H / 2.0, R = 200.0;
    double cmax = 0.0;
    for (const auto& e : curve.entries)
        if (e.ok) cmax = std::max(cmax, e.c);
    if (!(cmax > 0.0)) cmax = 1.0;
    double scale = R / (1.15 * cmax);

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // Reference circles at quarter steps of the max speed.
    for (int k = 1; k <= 4; ++k) {
        double r = scale * cmax * double(k) / 4.0;
        os << "<circle cx=\"" << svg_num(cx) << "\" cy=\"" << svg_num(cy) << "\" r=\""
           << svg_num(r) << "\" fill=\"none\" stroke=\"#cccccc\"/>\n"
           << "<text x=\"" << svg_num(cx + r + 3.0) << "\" y=\"" << svg_num(cy - 3.0)
           << "\" font-size=\"11\" fill=\"#888888\">" << svg_num(cmax * double(k) / 4.0)
           << "</text>\n";
    }
    os << "<line x1=\"" << svg_num(cx - R - 10) << "\" y1=\"" << svg_num(cy) << "\" x2=\""
       << svg_num(cx + R + 10) << "\" y2=\"" << svg_num(cy) << "\" stroke=\"#aaaaaa\"/>\n"
       << "<line x1=\"" << svg_num(cx) << "\" y1=\"" << svg_num(cy - R - 10) << "\" x2=\""
       << svg_num(cx) << "\" y2=\"" << svg_num(cy + R + 10) << "\" stroke=\"#aaaaaa\"/>\n";
    std::ostringstream path;
    bool first = true;
    for (const auto& e : curve.entries) {
        if (!e.ok) continue;
        double x = cx + scale * e.c * std::cos(e.angle);
        double y = cy - scale * e.c * std::sin(e.angle);
        path << (first ? "M" : " L") << svg_num(x) << " " << svg_num(y);
        first = false;
    }
    if (!first) path << " Z";
    os << "<path d=\"" << path.str()
       << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    for (const auto& e : curve.entries) {
        if (!e.ok) continue;
        double x = cx + scale * e.c * std::cos(e.angle);
        double y = cy - scale * e.c * std::sin(e.angle);
        os << "<circle cx=\"" << svg_num(x) << "\" cy=\"" << svg_num(y)
           << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    os << "<text x=\"10\" y=\"20\" font-size=\"13\">speed curve c(n), method "
       << to_string(curve.method, curve.eps) << "</text>\n</svg>\n";
    return os.str();
}

std::string line_svg(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& x_label, const std::string& y_label,
                     const std::string& title) {
    if (x.size() != y.size() || x.empty()) throw config_error("line_svg: empty or mismatched data");
    const double W = 640.0, H = 420.0, L = 70.0, Rm = 20.0, T = 40.0, B = 50.0;
    double xmin = x.front(), xmax = x.front(), ymin = y.front(), ymax = y.front();
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!std::isfinite(y[k])) continue;
        xmin = std::min(xmin, x[k]);
        xmax = std::max(xmax, x[k]);
        ymin = std::min(ymin, y[k]);
        ymax = std::max(ymax, y[k]);
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    auto px = [&](double v) { return L + (W - L - Rm) * (v - xmin) / (xmax - xmin); };
    auto py = [&](double v) { return H - B - (H - T - B) * (v - ymin) / (ymax - ymin); };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<line x1=\"" << svg_num(L) << "\" y1=\"" << svg_num(H - B) << "\" x2=\"" << svg_num(W - Rm)
       << "\" y2=\"" << svg_num(H - B) << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << svg_num(L) << "\" y1=\"" << svg_num(T) << "\" x2=\"" << svg_num(L)
       << "\" y2=\"" << svg_num(H - B) << "\" stroke=\"black\"/>\n";
    std::ostringstream pl;
    bool first = true;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!std::isfinite(y[k])) continue;
        pl << (first ? "" : " ") << svg_num(px(x[k])) << "," << svg_num(py(y[k]));
        first = false;
    }
    os << "<polyline points=\"" << pl.str()
       << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n"
       << "<text x=\"" << svg_num(L) << "\" y=\"" << svg_num(H - B + 30)
       << "\" font-size=\"12\">" << svg_num(xmin) << "</text>\n"
       << "<text x=\"" << svg_num(W - Rm - 50) << "\" y=\"" << svg_num(H - B + 30)
       << "\" font-size=\"12\">" << svg_num(xmax) << "</text>\n"
       << "<text x=\"5\" y=\"" << svg_num(H - B) << "\" font-size=\"12\">" << svg_num(ymin)
       << "</text>\n"
       << "<text x=\"5\" y=\"" << svg_num(T + 10) << "\" font-size=\"12\">" << svg_num(ymax)
       << "</text>\n"
       << "<text x=\"" << svg_num(W / 2 - 30) << "\" y=\"" << svg_num(H - 10)
       << "\" font-size=\"13\">" << x_label << "</text>\n"
       << "<text x=\"10\" y=\"20\" font-size=\"13\">" << title << " (" << y_label << ")</text>\n"
       << "</svg>\n";
    return os.str();
}

std::string spreading_json(const SpreadingReport& r) {
    nlohmann::json j;
    j["alpha"] = r.alpha;
    j["delta"] = r.delta;
    j["ratio_gate"] = r.ratio_gate;
    j["max_tau"] = r.max_tau;
    j["min_tau"] = r.min_tau;
    j["ratio"] = std::isfinite(r.ratio) ? nlohmann::json(r.ratio) : nlohmann::json("inf");
    j["all_finite"] = r.all_finite;
    j["any_inconclusive"] = r.any_inconclusive;
    j["pass"] = r.pass;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : r.entries) {
        nlohmann::json je;
        je["angle"] = e.angle;
        je["n"] = e.n.dim > 1 ? nlohmann::json::array({e.n[0], e.n[1]})
                              : nlohmann::json::array({e.n[0]});
        je["c_ref"] = e.c_ref;
        je["tau"] = e.found ? nlohmann::json(e.tau) : nlohmann::json("inf");
        je["found"] = e.found;
        je["inconclusive"] = e.inconclusive;
        je["t_evaluable"] = e.t_evaluable;
        je["ok"] = e.ok;
        if (!e.error.empty()) je["error"] = e.error;
        j["entries"].push_back(je);
    }
    return j.dump(2) + "\n";
}

void save_state(const std::string& path, const SimState& state) {
    nlohmann::json h;
    h["t"] = state.t;
    h["dim"] = state.grid.dim;
    h["lo"] = {state.grid.lo[0], state.grid.lo[1]};
    h["extent"] = {state.grid.extent[0], state.grid.extent[1]};
    h["nodes"] = {state.grid.nodes[0], state.grid.nodes[1]};
    h["bc"] = {state.grid.bc[0] == Bc::periodic ? "periodic" : "noflux",
               state.grid.bc[1] == Bc::periodic ? "periodic" : "noflux"};
    h["count"] = state.u.size();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("save_state: cannot open " + path);
    os << "PFSNAP1\n" << h.dump() << "\n";
    os.write(reinterpret_cast<const char*>(state.u.data()),
             std::streamsize(state.u.size() * sizeof(double)));
    if (!os) throw config_error("save_state: write failed for " + path);
}

SimState load_state(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("load_state: cannot open " + path);
    std::string magic, header;
    std::getline(is, magic);
    if (magic != "PFSNAP1") throw config_error("load_state: bad magic in " + path);
    std::getline(is, header);
    nlohmann::json h = nlohmann::json::parse(header);
    SimState s;
    s.t = h.at("t").get<double>();
    auto bcs = h.at("bc");
    auto bc_of = [](const std::string& v) { return v == "periodic" ? Bc::periodic : Bc::noflux; };
    s.grid = GridSpec(h.at("dim").get<int>(),
                      {h.at("lo")[0].get<double>(), h.at("lo")[1].get<double>()},
                      {h.at("extent")[0].get<double>(), h.at("extent")[1].get<double>()},
                      {h.at("nodes")[0].get<std::size_t>(), h.at("nodes")[1].get<std::size_t>()},
                      {bc_of(bcs[0].get<std::string>()), bc_of(bcs[1].get<std::string>())});
    auto count = h.at("count").get<std::size_t>();
    s.u.resize(count);
    is.read(reinterpret_cast<char*>(s.u.data()), std::streamsize(count * sizeof(double)));
    if (std::size_t(is.gcount()) != count * sizeof(double))
        throw config_error("load_state: truncated payload in " + path);
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open for writing: " + path);
    os << content;
    if (!os) throw config_error("write failed: " + path);
}

std::uint64_t file_fnv1a(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[65536];
    while (is.read(buf, sizeof buf) || is.gcount() > 0)
        h = fnv1a(buf, std::size_t(is.gcount()), h);
    return h;
}

std::string iso8601_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void RunManifest::add_output(const std::string& path) {
    outputs.emplace_back(path, hex64(file_fnv1a(path)));
}

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::json j;
    j["tool_version"] = m.tool_version;
    j["config"] = m.config_json.empty() ? nlohmann::json(nullptr)
                                        : nlohmann::json::parse(m.config_json);
    j["input_hashes"] = m.input_hashes;
    j["outputs"] = nlohmann::json::array();
    for (const auto& [p, h] : m.outputs) j["outputs"].push_back({{"path", p}, {"hash", h}});
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace pfront
