#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pfront/config.hpp"
#include "pfront/io.hpp"
#include "pfront/simulate.hpp"
#include "pfront/util.hpp"

namespace fs = std::filesystem;
using namespace pfront;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / "pfront_io_cli" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(bool(is));
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

std::vector<std::string> cells_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string cell;
    while (std::getline(is, cell, ',')) out.push_back(cell);
    return out;
}

struct CliResult {
    int code = -1;
    std::string out, err;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const char* bin = std::getenv("PFRONTCTL_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "PFRONTCTL_BIN must point at the CLI binary");
    fs::path so = dir / "stdout.txt", se = dir / "stderr.txt";
    std::string cmd = std::string("\"") + bin + "\" " + args + " >\"" + so.string() + "\" 2>\"" +
                      se.string() + "\"";
    int rc = std::system(cmd.c_str());
    CliResult r;
    if (rc != -1 && WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    os << content;
    REQUIRE(bool(os));
}

const char* kEigenConfig = R"({
  "medium": {
    "cell": {"dim": 2, "lengths": [1, 1]},
    "tensor": {"kind": "constant", "a11": 1, "a22": 1, "res": [16, 16]}
  },
  "nonlinearity": {"kind": "kpp", "r": {"kind": "constant", "value": 1, "res": [16, 16]}},
  "eigen": {"resolution": [24, 24]},
  "directions": {"n_samples": 4}
})";

}  // namespace

TEST_CASE("csv quoting follows the doubled-quote convention") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("q\"x") == "\"q\"\"x\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
    CHECK(csv_table({"a", "b"}, {{"1", "x,y"}}) == "a,b\n1,\"x,y\"\n");
}

TEST_CASE("emitters put the column names on the first row") {
    FrontTrace tr;
    tr.times = {0.0, 1.0};
    tr.positions = {0.5, 2.5};
    CHECK(lines_of(trace_csv(tr))[0] == "t,position");

    WaveProfile prof;
    prof.z = {0.0};
    prof.U = {0.25};
    CHECK(lines_of(profile_csv(prof))[0] == "z,U");

    CHECK(lines_of(eigen_csv({EigenRow{0.0, 1.0, 2.0, 1e-10}}))[0] ==
          "angle,lambda_min,c_lin,mu0_residual");

    SupersolutionReport rep;
    rep.worst_slice.push_back({0.0, 1.0, 2.0, 0.5});
    CHECK(lines_of(residual_csv(rep))[0] == "t,x1,x2,residual");

    SpeedCurve curve;
    curve.method = SpeedMethod::eigen_lin;
    SpeedEntry e;
    e.angle = 0.0;
    e.c = 2.0;
    e.ok = true;
    curve.entries.push_back(e);
    SpeedEntry bad;
    bad.angle = 1.0;
    bad.ok = false;
    bad.error = "solver, diverged";
    curve.entries.push_back(bad);
    auto ls = lines_of(curve_csv(curve));
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == "angle,c,method,uncertainty,flags");
    CHECK(ls[1].find("eigen_lin") != std::string::npos);
    CHECK(ls[1].find(",ok") != std::string::npos);
    // the embedded comma in the failure note is quoted, not a new column
    CHECK(ls[2].find("\"failed: solver, diverged\"") != std::string::npos);
}

TEST_CASE("state snapshots round-trip bit-exactly") {
    GridSpec g(2, {-1.0, 0.5}, {2.0, 3.0}, {5, 4}, {Bc::noflux, Bc::periodic});
    SimState s;
    s.t = 1.25;
    s.grid = g;
    s.u.resize(g.count());
    for (std::size_t k = 0; k < s.u.size(); ++k) s.u[k] = 0.1 * double(k) - 0.7;
    s.u[0] = 5e-324;  // denormal survives the binary payload
    s.u[1] = -0.0;
    s.u[2] = 1e308;

    fs::path dir = scratch("snap");
    fs::path p = dir / "state.bin";
    save_state(p.string(), s);
    SimState r = load_state(p.string());
    CHECK(r.t == 1.25);
    CHECK(r.grid.dim == 2);
    CHECK(r.grid.lo == g.lo);
    CHECK(r.grid.extent == g.extent);
    CHECK(r.grid.nodes == g.nodes);
    CHECK(r.grid.bc == g.bc);
    REQUIRE(r.u.size() == s.u.size());
    for (std::size_t k = 0; k < s.u.size(); ++k) CHECK(r.u[k] == s.u[k]);
    CHECK(std::signbit(r.u[1]));

    fs::path bad = dir / "bad.bin";
    write_file(bad, "NOTSNAP\n{}\n");
    CHECK_THROWS_WITH_AS(load_state(bad.string()), doctest::Contains("bad magic"), config_error);

    fs::resize_file(p, fs::file_size(p) - 8);
    CHECK_THROWS_WITH_AS(load_state(p.string()), doctest::Contains("truncated"), config_error);
}

TEST_CASE("svg documents are standalone and skip non-finite samples") {
    std::string svg = line_svg({0.0, 1.0, 2.0}, {0.0, std::nan(""), 4.0}, "t", "y", "demo");
    CHECK(svg.rfind("<?xml version=\"1.0\"", 0) == 0);
    CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
    CHECK_THROWS_AS(line_svg({}, {}, "x", "y", "t"), config_error);

    SpeedCurve curve;
    curve.method = SpeedMethod::sim_direct;
    for (int k = 0; k < 4; ++k) {
        SpeedEntry e;
        e.angle = 2.0 * M_PI * double(k) / 4.0;
        e.c = 2.0;
        e.ok = true;
        curve.entries.push_back(e);
    }
    std::string polar = polar_svg(curve);
    CHECK(polar.rfind("<?xml version=\"1.0\"", 0) == 0);
    CHECK(polar.find("speed curve c(n)") != std::string::npos);
    CHECK(polar.substr(polar.size() - 7) == "</svg>\n");
}

TEST_CASE("spreading reports serialize unreached thresholds as the string inf") {
    SpreadingReport r;
    r.alpha = 0.4;
    r.delta = 0.05;
    r.ratio_gate = 4.0;
    r.max_tau = 8.0;
    r.min_tau = 4.0;
    r.ratio = 2.0;
    r.all_finite = false;
    r.pass = false;
    SpreadingEntry good;
    good.n = Direction::axis(2, 0, 1.0);
    good.c_ref = 2.0;
    good.tau = 4.0;
    good.found = true;
    good.ok = true;
    SpreadingEntry never;
    never.n = Direction::axis(2, 1, 1.0);
    never.angle = M_PI / 2.0;
    never.c_ref = 2.0;
    never.tau = std::numeric_limits<double>::infinity();
    never.ok = true;
    never.error = "boom";
    r.entries = {good, never};

    auto j = nlohmann::json::parse(spreading_json(r));
    CHECK(j.at("pass") == false);
    CHECK(j.at("entries").size() == 2);
    CHECK(j.at("entries")[0].at("tau").get<double>() == 4.0);
    CHECK(j.at("entries")[1].at("tau").get<std::string>() == "inf");
    CHECK(j.at("entries")[1].at("error").get<std::string>() == "boom");
    CHECK(j.at("entries")[0].at("n")[0].get<double>() == 1.0);
}

TEST_CASE("content hashes follow 64-bit fnv1a") {
    fs::path dir = scratch("hash");
    fs::path empty = dir / "empty.txt", abc = dir / "abc.txt";
    write_file(empty, "");
    write_file(abc, "abc");
    CHECK(file_fnv1a(empty.string()) == 0xcbf29ce484222325ull);  // offset basis
    CHECK(file_fnv1a(abc.string()) == fnv1a("abc", 3));
    CHECK(file_fnv1a(abc.string()) != file_fnv1a(empty.string()));
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
    CHECK_THROWS_AS(file_fnv1a((dir / "missing").string()), config_error);
}

TEST_CASE("manifests list every output with its hash") {
    fs::path dir = scratch("manifest");
    write_file(dir / "a.csv", "x\n1\n");
    write_file(dir / "b.svg", "<svg/>");
    RunManifest m;
    m.tool_version = kToolVersion;
    m.started_at = "2026-01-01T00:00:00Z";
    m.finished_at = "2026-01-01T00:00:01Z";
    m.add_output((dir / "a.csv").string());
    m.add_output((dir / "b.svg").string());
    write_manifest((dir / "manifest.json").string(), m);

    auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(j.at("tool_version").get<std::string>() == kToolVersion);
    CHECK(j.at("config").is_null());
    REQUIRE(j.at("outputs").size() == 2);
    CHECK(j.at("outputs")[0].at("path").get<std::string>() == (dir / "a.csv").string());
    CHECK(j.at("outputs")[0].at("hash").get<std::string>() ==
          hex64(file_fnv1a((dir / "a.csv").string())));
    CHECK(j.at("outputs")[1].at("hash").get<std::string>() ==
          hex64(file_fnv1a((dir / "b.svg").string())));
}

TEST_CASE("cli eigen run emits csv plus a manifest and is byte-deterministic") {
    fs::path dir = scratch("cli_eigen");
    write_file(dir / "cfg.json", kEigenConfig);
    fs::path out1 = dir / "out1", out2 = dir / "out2";

    CliResult r1 = run_cli("eigen --config \"" + (dir / "cfg.json").string() + "\" --out \"" +
                               out1.string() + "\"",
                           dir);
    CHECK(r1.code == 0);
    CHECK(r1.out.find("eigen: 4 directions") != std::string::npos);

    std::string csv = slurp(out1 / "eigen.csv");
    auto ls = lines_of(csv);
    REQUIRE(ls.size() == 5);
    CHECK(ls[0] == "angle,lambda_min,c_lin,mu0_residual");
    for (std::size_t k = 1; k < ls.size(); ++k) {
        auto cells = cells_of(ls[k]);
        REQUIRE(cells.size() == 4);
        CHECK(std::abs(std::strtod(cells[2].c_str(), nullptr) - 2.0) <= 5e-3);
    }

    auto man = nlohmann::json::parse(slurp(out1 / "manifest.json"));
    CHECK(man.at("tool_version").get<std::string>() == kToolVersion);
    REQUIRE(man.at("outputs").size() == 1);
    CHECK(man.at("outputs")[0].at("path").get<std::string>() == (out1 / "eigen.csv").string());
    CHECK(man.at("outputs")[0].at("hash").get<std::string>() ==
          hex64(file_fnv1a((out1 / "eigen.csv").string())));
    CHECK(man.at("input_hashes").contains("config"));
    auto cfg = nlohmann::json::parse(std::string(kEigenConfig));
    PeriodicMedium med = parse_medium(cfg.at("medium"));
    CHECK(man.at("input_hashes").at("medium").get<std::string>() == hex64(med.hash()));
    std::string t0 = man.at("started_at").get<std::string>();
    CHECK(t0.size() == 20);
    CHECK(t0.back() == 'Z');

    CliResult r2 = run_cli("eigen --config \"" + (dir / "cfg.json").string() + "\" --out \"" +
                               out2.string() + "\"",
                           dir);
    CHECK(r2.code == 0);
    CHECK(slurp(out2 / "eigen.csv") == csv);
}

TEST_CASE("cli speed run writes speed, trace and svg outputs") {
    fs::path dir = scratch("cli_speed");
    write_file(dir / "cfg.json", R"({
  "medium": {
    "cell": {"dim": 1, "lengths": [1]},
    "tensor": {"kind": "constant", "a11": 1, "res": [16]}
  },
  "nonlinearity": {"kind": "kpp", "r": {"kind": "constant", "value": 1, "res": [16]}},
  "run": {"h": 0.05, "t_end": 20},
  "directions": [[1], [-1]]
})");
    fs::path out = dir / "out";
    CliResult r = run_cli("speed --config \"" + (dir / "cfg.json").string() + "\" --out \"" +
                              out.string() + "\"",
                          dir);
    CHECK(r.code == 0);

    auto ls = lines_of(slurp(out / "speed.csv"));
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == "angle,c,method,uncertainty,flags");
    for (std::size_t k = 1; k < ls.size(); ++k) {
        auto cells = cells_of(ls[k]);
        REQUIRE(cells.size() == 5);
        CHECK(std::abs(std::strtod(cells[1].c_str(), nullptr) - 2.0) <= 0.15);
        CHECK(cells[2] == "sim_direct");
        CHECK(cells[4] == "full");
    }
    CHECK(lines_of(slurp(out / "trace.csv"))[0] == "t,position");
    std::string svg = slurp(out / "trace.svg");
    CHECK(svg.rfind("<?xml version=\"1.0\"", 0) == 0);
    CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
    auto man = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(man.at("outputs").size() == 3);
}

TEST_CASE("cli validate runs the supersolution certificate from a config") {
    fs::path dir = scratch("cli_validate");
    write_file(dir / "cfg.json", R"({
  "medium": {
    "cell": {"dim": 2, "lengths": [1, 1]},
    "tensor": {"kind": "constant", "a11": 1, "a22": 1, "res": [16, 16]}
  },
  "nonlinearity": {"kind": "ignition", "theta": 0.3},
  "supersolution": {
    "n_samples": 4,
    "grid": {"lo": [-30, -30], "hi": [30, 30], "h": 1.0},
    "window": {"t0": 0, "t1": 2, "nt": 3}
  }
})");
    fs::path out = dir / "out";
    CliResult r = run_cli("validate --config \"" + (dir / "cfg.json").string() + "\" --out \"" +
                              out.string() + "\"",
                          dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("supersolution: lambda") != std::string::npos);
    CHECK(r.out.find("pass") != std::string::npos);
    auto j = nlohmann::json::parse(slurp(out / "supersolution.json"));
    CHECK(j.at("pass") == true);
    CHECK(j.at("directions") == 4);
    CHECK(j.at("lambda").get<double>() > 0.0);
    CHECK(lines_of(slurp(out / "supersolution_residuals.csv"))[0] == "t,x1,x2,residual");
}

TEST_CASE("cli maps error families onto distinct exit codes") {
    fs::path dir = scratch("cli_errors");

    write_file(dir / "broken.json", "{ nope");
    CliResult r = run_cli("eigen --config \"" + (dir / "broken.json").string() + "\"", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
    CHECK(r.err.find("malformed JSON") != std::string::npos);

    write_file(dir / "incomplete.json", R"({
  "medium": {
    "cell": {"dim": 1, "lengths": [1]},
    "tensor": {"kind": "constant", "a11": 1, "res": [16]}
  }
})");
    r = run_cli("eigen --config \"" + (dir / "incomplete.json").string() + "\"", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("missing key nonlinearity") != std::string::npos);

    // missing required --config is a usage error
    r = run_cli("eigen", dir);
    CHECK(r.code == 2);

    write_file(dir / "coarse.json", R"({
  "medium": {
    "cell": {"dim": 2, "lengths": [1, 1]},
    "tensor": {"kind": "constant", "a11": 1, "a22": 1, "res": [16, 16]}
  },
  "nonlinearity": {"kind": "kpp", "r": {"kind": "constant", "value": 1, "res": [16, 16]}},
  "eigen": {"resolution": [4, 4]},
  "directions": {"n_samples": 2}
})");
    r = run_cli("eigen --config \"" + (dir / "coarse.json").string() + "\" --out \"" +
                    (dir / "out_coarse").string() + "\"",
                dir);
    CHECK(r.code == 3);
    CHECK(r.err.find("numerical failure") != std::string::npos);

    write_file(dir / "short.json", R"({
  "medium": {
    "cell": {"dim": 1, "lengths": [1]},
    "tensor": {"kind": "constant", "a11": 1, "res": [16]}
  },
  "nonlinearity": {"kind": "kpp", "r": {"kind": "constant", "value": 1, "res": [16]}},
  "run": {"h": 0.05, "t_end": 2, "level": 0.999},
  "directions": [[1]]
})");
    r = run_cli("speed --config \"" + (dir / "short.json").string() + "\" --out \"" +
                    (dir / "out_short").string() + "\"",
                dir);
    CHECK(r.code == 3);
    CHECK(r.err.find("level set") != std::string::npos);

    write_file(dir / "noblock.json", R"({
  "medium": {
    "cell": {"dim": 1, "lengths": [1]},
    "tensor": {"kind": "constant", "a11": 1, "res": [16]}
  },
  "nonlinearity": {"kind": "kpp", "r": {"kind": "constant", "value": 1, "res": [16]}}
})");
    r = run_cli("validate --config \"" + (dir / "noblock.json").string() + "\"", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("spreading or supersolution") != std::string::npos);
}
