#include "pfront/config.hpp"

#include <fstream>

#include "pfront/util.hpp"

namespace pfront {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& keypath) {
    if (!j.is_object() || !j.contains(key))
        throw config_error("config: missing key " + keypath + "." + key);
    return j.at(key);
}

double num(const json& j, const std::string& key, const std::string& keypath) {
    const json& v = require(j, key, keypath);
    if (!v.is_number()) throw config_error("config: " + keypath + "." + key + " must be a number");
    return v.get<double>();
}

double num_or(const json& j, const std::string& key, const std::string& keypath, double dflt) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    return num(j, key, keypath);
}

std::string str(const json& j, const std::string& key, const std::string& keypath) {
    const json& v = require(j, key, keypath);
    if (!v.is_string()) throw config_error("config: " + keypath + "." + key + " must be a string");
    return v.get<std::string>();
}

std::array<std::size_t, 2> res_or(const json& j, const std::string& keypath, int dim,
                                  std::array<std::size_t, 2> dflt) {
    if (!j.is_object() || !j.contains("res")) return dim == 1 ? decltype(dflt){dflt[0], 1} : dflt;
    const json& v = j.at("res");
    if (!v.is_array() || v.empty() || v.size() > 2)
        throw config_error("config: " + keypath + ".res must be an array of 1 or 2 counts");
    std::array<std::size_t, 2> r{v[0].get<std::size_t>(),
                                 v.size() > 1 ? v[1].get<std::size_t>() : 1};
    if (dim == 1) r[1] = 1;
    if (r[0] < 1 || r[1] < 1)
        throw config_error("config: " + keypath + ".res entries must be >= 1");
    return r;
}

ScalarField parse_scalar(const json& j, const PeriodicCell& cell, const std::string& keypath) {
    std::string kind = str(j, "kind", keypath);
    auto res = res_or(j, keypath, cell.dim, {64, 64});
    if (kind == "constant") return scalar_constant(cell, res, num(j, "value", keypath));
    if (kind == "cosine")
        return scalar_cosine(cell, res, num(j, "base", keypath), num(j, "amp1", keypath),
                             num_or(j, "amp2", keypath, 0.0));
    throw config_error("config: " + keypath + ".kind unknown value '" + kind + "'");
}

}  // namespace

const json& require_root(const json& root, const std::string& key) {
    if (!root.is_object() || !root.contains(key))
        throw config_error("config: missing key " + key);
    return root.at(key);
}

json load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("config: cannot open file " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& ex) {
        throw config_error(std::string("config: malformed JSON: ") + ex.what());
    }
}

PeriodicCell parse_cell(const json& j, const std::string& keypath) {
    const json& d = require(j, "dim", keypath);
    if (!d.is_number_integer()) throw config_error("config: " + keypath + ".dim must be 1 or 2");
    int dim = d.get<int>();
    const json& L = require(j, "lengths", keypath);
    if (!L.is_array() || L.size() != std::size_t(dim))
        throw config_error("config: " + keypath + ".lengths must have dim entries");
    std::array<double, 2> lengths{1.0, 1.0};
    for (int k = 0; k < dim; ++k) {
        if (!L[std::size_t(k)].is_number())
            throw config_error("config: " + keypath + ".lengths entries must be numbers");
        lengths[std::size_t(k)] = L[std::size_t(k)].get<double>();
    }
    try {
        return PeriodicCell(dim, lengths);
    } catch (const std::exception& ex) {
        throw config_error("config: " + keypath + ": " + ex.what());
    }
}

PeriodicMedium parse_medium(const json& j, const std::string& keypath) {
    PeriodicCell cell = parse_cell(require(j, "cell", keypath), keypath + ".cell");

    const json& tj = require(j, "tensor", keypath);
    std::string tpath = keypath + ".tensor";
    std::string tkind = str(tj, "kind", tpath);
    auto tres = res_or(tj, tpath, cell.dim, {64, 64});
    TensorField A;
    if (tkind == "constant") {
        A = tensor_constant(cell, tres, num(tj, "a11", tpath), num_or(tj, "a12", tpath, 0.0),
                            num_or(tj, "a22", tpath, 1.0));
    } else if (tkind == "cosine_diag") {
        A = tensor_cosine_diag(cell, tres, num(tj, "base1", tpath), num(tj, "amp1", tpath),
                               num_or(tj, "base2", tpath, 1.0), num_or(tj, "amp2", tpath, 0.0));
    } else {
        throw config_error("config: " + tpath + ".kind unknown value '" + tkind + "'");
    }

    VectorField q;
    if (j.contains("flow")) {
        const json& fj = j.at("flow");
        std::string fpath = keypath + ".flow";
        std::string fkind = str(fj, "kind", fpath);
        auto fres = res_or(fj, fpath, cell.dim, tres);
        if (fkind == "zero") {
            q = flow_zero(cell, fres);
        } else if (fkind == "cellular") {
            q = flow_cellular(cell, fres, num(fj, "amp", fpath));
        } else if (fkind == "constant") {
            const json& qv = require(fj, "q", fpath);
            if (!qv.is_array() || qv.size() != std::size_t(cell.dim))
                throw config_error("config: " + fpath + ".q must have dim entries");
            bool bypass = fj.contains("test_only_bypass") && fj.at("test_only_bypass").is_boolean()
                              ? fj.at("test_only_bypass").get<bool>()
                              : false;
            q = flow_constant(cell, fres,
                              {qv[0].get<double>(),
                               cell.dim > 1 ? qv[1].get<double>() : 0.0},
                              bypass);
        } else {
            throw config_error("config: " + fpath + ".kind unknown value '" + fkind + "'");
        }
    } else {
        q = flow_zero(cell, tres);
    }
    try {
        return PeriodicMedium{cell, A, q};
    } catch (const std::exception& ex) {
        throw config_error("config: " + keypath + ": " + ex.what());
    }
}

Nonlinearity parse_nonlinearity(const json& j, const PeriodicCell& cell,
                                const std::string& keypath) {
    std::string kind = str(j, "kind", keypath);
    try {
        if (kind == "kpp") return make_kpp(parse_scalar(require(j, "r", keypath), cell, keypath + ".r"));
        if (kind == "general_monostable")
            return make_general_monostable(
                parse_scalar(require(j, "r", keypath), cell, keypath + ".r"),
                num(j, "push", keypath));
        if (kind == "ignition") return make_ignition(cell, num(j, "theta", keypath));
        if (kind == "ignition_approx")
            return make_ignition_approx(
                parse_nonlinearity(require(j, "base", keypath), cell, keypath + ".base"),
                num(j, "eps", keypath));
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& ex) {
        throw config_error("config: " + keypath + ": " + ex.what());
    }
    throw config_error("config: " + keypath + ".kind unknown value '" + kind + "'");
}

std::vector<Direction> parse_directions(const json& root, int dim) {
    if (!root.contains("directions")) return direction_sample(dim, dim == 1 ? 2 : 8);
    const json& j = root.at("directions");
    if (j.is_object()) {
        const json& ns = require(j, "n_samples", "directions");
        if (!ns.is_number_integer() || ns.get<long>() < 1)
            throw config_error("config: directions.n_samples must be a positive integer");
        return direction_sample(dim, ns.get<std::size_t>());
    }
    if (j.is_array()) {
        std::vector<Direction> out;
        for (std::size_t k = 0; k < j.size(); ++k) {
            const json& v = j[k];
            if (!v.is_array() || v.size() != std::size_t(dim))
                throw config_error("config: directions[" + std::to_string(k) +
                                   "] must have dim components");
            double x = v[0].get<double>(), y = dim > 1 ? v[1].get<double>() : 0.0;
            double norm = std::sqrt(x * x + y * y);
            if (!(norm > 0.0))
                throw config_error("config: directions[" + std::to_string(k) + "] is zero");
            out.push_back(Direction(dim, {x / norm, dim > 1 ? y / norm : 0.0}));
        }
        return out;
    }
    throw config_error("config: directions must be an object or an array");
}

EigenBlock parse_eigen_block(const json& root) {
    EigenBlock b;
    if (!root.contains("eigen")) return b;
    const json& j = root.at("eigen");
    if (j.contains("resolution")) {
        const json& r = j.at("resolution");
        if (!r.is_array() || r.empty() || r.size() > 2)
            throw config_error("config: eigen.resolution must be an array of 1 or 2 counts");
        b.resolution = {r[0].get<std::size_t>(), r.size() > 1 ? r[1].get<std::size_t>() : r[0].get<std::size_t>()};
    }
    b.lambda_lo = num_or(j, "lambda_lo", "eigen", b.lambda_lo);
    b.lambda_hi = num_or(j, "lambda_hi", "eigen", b.lambda_hi);
    if (!(b.lambda_lo > 0.0) || !(b.lambda_hi > b.lambda_lo))
        throw config_error("config: eigen.lambda bracket must satisfy 0 < lambda_lo < lambda_hi");
    return b;
}

SpeedRunConfig parse_run_block(const json& root) {
    SpeedRunConfig c;
    if (!root.contains("run")) return c;
    const json& j = root.at("run");
    c.h = num_or(j, "h", "run", c.h);
    c.t_end = num_or(j, "t_end", "run", c.t_end);
    c.level = num_or(j, "level", "run", c.level);
    c.record_dt = num_or(j, "record_dt", "run", c.record_dt);
    c.transient_cut = num_or(j, "transient_cut", "run", c.transient_cut);
    if (!(c.h > 0.0)) throw config_error("config: run.h must be positive");
    if (!(c.t_end > 0.0)) throw config_error("config: run.t_end must be positive");
    if (!(c.level > 0.0) || !(c.level < 1.0))
        throw config_error("config: run.level must lie in (0,1)");
    if (!(c.transient_cut >= 0.0) || !(c.transient_cut < 1.0))
        throw config_error("config: run.transient_cut must lie in [0,1)");
    return c;
}

ScanBlock parse_scan_block(const json& root) {
    ScanBlock b;
    if (!root.contains("scan")) throw config_error("config: missing key scan");
    const json& j = root.at("scan");
    const json& ns = require(j, "n_samples", "scan");
    if (!ns.is_number_integer()) throw config_error("config: scan.n_samples must be an integer");
    b.n_samples = ns.get<std::size_t>();
    std::string m = str(j, "method", "scan");
    if (m == "eigen_lin") b.method = SpeedMethod::eigen_lin;
    else if (m == "sim_direct") b.method = SpeedMethod::sim_direct;
    else if (m == "sim_ignition_approx") b.method = SpeedMethod::sim_ignition_approx;
    else throw config_error("config: scan.method unknown value '" + m + "'");
    if (b.method == SpeedMethod::sim_ignition_approx) b.eps = num(j, "eps", "scan");
    return b;
}

ApproxBlock parse_approx_block(const json& root) {
    ApproxBlock b;
    if (!root.contains("approx")) throw config_error("config: missing key approx");
    const json& j = root.at("approx");
    const json& el = require(j, "eps_list", "approx");
    if (!el.is_array() || el.empty())
        throw config_error("config: approx.eps_list must be a nonempty array");
    for (const auto& v : el) {
        if (!v.is_number()) throw config_error("config: approx.eps_list entries must be numbers");
        b.eps_list.push_back(v.get<double>());
    }
    if (j.contains("n_samples")) b.n_samples = j.at("n_samples").get<std::size_t>();
    return b;
}

SpreadingBlock parse_spreading_block(const json& root) {
    SpreadingBlock b;
    if (!root.contains("spreading")) return b;
    b.present = true;
    const json& j = root.at("spreading");
    b.params.alpha = num(j, "alpha", "spreading");
    b.params.delta = num(j, "delta", "spreading");
    b.params.h = num_or(j, "h", "spreading", b.params.h);
    b.params.t_end = num_or(j, "t_end", "spreading", b.params.t_end);
    b.params.record_dt = num_or(j, "record_dt", "spreading", b.params.record_dt);
    b.params.window_margin = num_or(j, "window_margin", "spreading", b.params.window_margin);
    b.params.ratio_gate = num_or(j, "gate", "spreading", b.params.ratio_gate);
    if (j.contains("n_samples")) b.n_samples = j.at("n_samples").get<std::size_t>();
    if (j.contains("c_ref")) {
        const json& cr = j.at("c_ref");
        if (!cr.is_array()) throw config_error("config: spreading.c_ref must be an array");
        for (const auto& v : cr) b.c_ref.push_back(v.get<double>());
    }
    return b;
}

SupersolutionBlock parse_supersolution_block(const json& root) {
    SupersolutionBlock b;
    if (!root.contains("supersolution")) return b;
    b.present = true;
    const json& j = root.at("supersolution");
    b.lambda = num_or(j, "lambda", "supersolution", 0.0);
    if (j.contains("n_samples")) b.n_samples = j.at("n_samples").get<int>();
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        b.grid_h = num_or(g, "h", "supersolution.grid", b.grid_h);
        auto rd2 = [&](const char* key, std::array<double, 2>& dst) {
            if (!g.contains(key)) return;
            const json& a = g.at(key);
            if (!a.is_array() || a.empty() || a.size() > 2)
                throw config_error(std::string("config: supersolution.grid.") + key +
                                   " must be an array of 1 or 2 numbers");
            dst[0] = a[0].get<double>();
            dst[1] = a.size() > 1 ? a[1].get<double>() : dst[0];
        };
        rd2("lo", b.grid_lo);
        rd2("hi", b.grid_hi);
    }
    if (j.contains("window")) {
        const json& w = j.at("window");
        b.window.t0 = num_or(w, "t0", "supersolution.window", b.window.t0);
        b.window.t1 = num_or(w, "t1", "supersolution.window", b.window.t1);
        if (w.contains("nt")) b.window.nt = w.at("nt").get<std::size_t>();
    }
    return b;
}

ProfileBlock parse_profile_block(const json& root) {
    ProfileBlock b;
    if (!root.contains("profile")) return b;
    const json& j = root.at("profile");
    b.snapshot_dt = num_or(j, "snapshot_dt", "profile", b.snapshot_dt);
    b.transient_cut = num_or(j, "transient_cut", "profile", b.transient_cut);
    if (!(b.snapshot_dt > 0.0)) throw config_error("config: profile.snapshot_dt must be positive");
    return b;
}

}  // namespace pfront
