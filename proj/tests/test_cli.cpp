#include "commands.hpp"
#include "output.hpp"
#include "parallel.hpp"
#include "scenario.hpp"

#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace shuntlab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("shuntlab_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "scenario.json";
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

int run_exe(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" SHUNTLAB_EXE "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scenario(const std::string& name) { return std::string(SHUNTLAB_SCENARIOS) + "/" + name; }

/// Data rows of a CSV file split into cells; metadata lines skipped, header returned separately.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    for (std::string c; std::getline(s, c, ',');) cells.push_back(c);
    return cells;
}

Table read_csv(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    Table t;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty())
            t.header = split(line);
        else
            t.rows.push_back(split(line));
    }
    return t;
}

Json read_json(const fs::path& p) {
    std::ifstream in(p);
    return Json::parse(in);
}

const char* kBeamModel = R"("model": {"type": "frequencies_hz", "f_sc": 31.08, "f_oc": 31.29, "cp_eps": 245e-9})";

}  // namespace

TEST_CASE("numbers are written with 17 significant digits and round-trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mant(1.0, 10.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 1000; ++i) {
        const double v = mant(rng) * std::pow(10.0, expo(rng));
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("JSON summaries keep insertion order and map non-finite values to null") {
    Json j;
    j["zeta"] = 1;
    j["alpha"] = 0.1;
    j["inf"] = INFINITY;
    j["list"] = {1.5, "x", true};
    j["empty"] = Json::object();
    const std::string s = dump_json(j);
    CHECK(s.find("zeta") < s.find("alpha"));
    CHECK(s.find("0.10000000000000001") != std::string::npos);
    CHECK(s.find("\"inf\": null") != std::string::npos);
    CHECK(s.find('\r') == std::string::npos);
    const Json back = Json::parse(s);
    CHECK(back["alpha"].get<double>() == 0.1);
    CHECK(back["list"][1] == "x");
}

TEST_CASE("CSV writer emits metadata, unit header and LF rows of fixed width") {
    const fs::path dir = scratch("csv");
    {
        CsvWriter csv(dir / "t.csv");
        csv.meta("k", 0.5);
        csv.header({{"a", "s"}, {"b", "-"}, {"c", "-"}});
        csv.row({1.0 / 3.0, 7LL, std::string("x")});
        CHECK_THROWS_AS(csv.row({1.0}), std::logic_error);
    }
    CHECK(slurp(dir / "t.csv") == "# k: 0.5\na (s),b (-),c (-)\n0.33333333333333331,7,x\n");
}

TEST_CASE("parallel map keeps index order for any thread budget") {
    for (const char* budget : {"1", "3", "0"}) {
        ::setenv("SHUNTLAB_THREADS", budget, 1);
        const auto v = parallel_map<std::size_t>(257, [](std::size_t i) { return i * i; });
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == i * i);
    }
    ::setenv("SHUNTLAB_THREADS", "4", 1);
    try {
        parallel_map<int>(50, [](std::size_t i) -> int {
            if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
            return 0;
        });
        FAIL("no exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "7");
    }
    ::unsetenv("SHUNTLAB_THREADS");
    CHECK(thread_budget() >= 1);
}

TEST_CASE("strict scenario parsing") {
    auto parse = [](const std::string& text) { return parse_scenario(Json::parse(text)); };

    const Scenario ok = parse(std::string(R"({"schema_version": 1, )") + kBeamModel +
                              R"(, "delay": {"variant": "pure", "taus": [0, 1e-3], "unit": "s"},
                                   "stabilization": {"pin": "a2"}})");
    REQUIRE(ok.model.has_value());
    CHECK(ok.model->kc() == doctest::Approx(0.116).epsilon(0.01));
    CHECK(ok.variant == shuntlab::DelayModel::Kind::PureDelay);
    CHECK(ok.taus.size() == 2);
    CHECK(ok.pin.name() == "a2");

    CHECK_THROWS_AS(parse(R"({"model": {"type": "normalized", "kc": 0.1}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 2})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "modle": {}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "model": {"type": "normalized", "kc": 0.1, "kcc": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "delay": {"tau": -1e-3}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "delay": {"tau": 1, "taus": [1]}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "delay": {"variant": "foh"}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "stabilization": {"pin": "c0"}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "grid": {"omega_min": 2, "omega_max": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "model": {"type": "modal", "omega_sc": 2, "omega_oc": 1, "cp_eps": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "analysis": "plot"})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"schema_version": 1, "simulation": {"substeps": 4}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"([1, 2])"), ConfigError);
}

TEST_CASE("delays in units of the critical delay") {
    const Scenario sc = parse_scenario(Json::parse(std::string(R"({"schema_version": 1, )") + kBeamModel +
                                                   R"(, "delay": {"taus": [0.5, 1], "unit": "critical"}})"));
    const auto t = sc.taus_seconds();
    CHECK(t[1] == doctest::Approx(1.3e-3).epsilon(0.03));
    CHECK(t[0] == doctest::Approx(t[1] / 2).epsilon(1e-14));
}

TEST_CASE("tune on the experimental beam") {
    const fs::path out = scratch("tune");
    REQUIRE(run_exe("tune --config '" + scenario("beam_tune.json") + "' --out '" + out.string() + "'") == 0);
    const Json j = read_json(out / "summary.json");
    CHECK(j["command"] == "tune");
    CHECK(j["model"]["kc"].get<double>() == doctest::Approx(0.116).epsilon(0.001 / 0.116));
    CHECK(j["shunt"]["inductance"].get<double>() == doctest::Approx(105.7).epsilon(0.005));
    CHECK(j["shunt"]["resistance"].get<double>() == doctest::Approx(2961.0).epsilon(0.01));
    const Table t = read_csv(out / "tune.csv");
    CHECK(t.header == std::vector<std::string>{"quantity (-)", "value (SI)", "unit (-)"});
}

TEST_CASE("critical with no coupling reports a zero critical delay") {
    const fs::path out = scratch("critical0");
    REQUIRE(run_exe("critical --config '" + scenario("uncoupled_critical.json") + "' --out '" + out.string() + "'") == 0);
    const Table t = read_csv(out / "critical.csv");
    REQUIRE(t.rows.size() == 3);
    REQUIRE(t.header[1] == "tau_c (s)");
    for (const auto& r : t.rows) CHECK(std::stod(r[1]) == 0.0);
}

TEST_CASE("critical on the beam agrees across methods") {
    const fs::path out = scratch("critical_beam");
    REQUIRE(run_exe("critical --config '" + scenario("beam_critical.json") + "' --out '" + out.string() + "'") == 0);
    const Json j = read_json(out / "summary.json");
    for (const auto& c : j["critical_delays"]) CHECK(c["tau_c"].get<double>() == doctest::Approx(1.3e-3).epsilon(0.03));
}

TEST_CASE("reproduce --figure 7 writes the critical-delay table") {
    const fs::path out = scratch("fig7");
    REQUIRE(run_exe("reproduce --figure 7 --out '" + out.string() + "'") == 0);
    const Table t = read_csv(out / "fig7.csv");
    std::vector<std::string> names;
    for (const auto& h : t.header) names.push_back(h.substr(0, h.find(' ')));
    CHECK(names == std::vector<std::string>{"Kc", "tau_c_zoh", "tau_c_pure", "tau_c_series"});
    REQUIRE(t.rows.size() >= 20);
    CHECK(std::stod(t.rows.front()[0]) == 1e-3);
    CHECK(std::stod(t.rows.back()[0]) == 0.3);
    const double ratio = std::stod(t.rows[1][0]) / std::stod(t.rows[0][0]);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        CHECK(std::stod(t.rows[i][0]) / std::stod(t.rows[i - 1][0]) == doctest::Approx(ratio).epsilon(1e-9));
        CHECK(std::stod(t.rows[i][1]) > std::stod(t.rows[i - 1][1]));
    }
}

TEST_CASE("every listed figure has a reproduce target") {
    for (int fig : {3, 4, 5, 7, 8, 9, 11, 13, 14})
        CHECK(std::find(reproducible_figures().begin(), reproducible_figures().end(), fig) !=
              reproducible_figures().end());
    const fs::path out = scratch("figs");
    for (int fig : {3, 4, 5, 6, 9, 13}) {
        const fs::path d = out / std::to_string(fig);
        CHECK(run_exe("reproduce --figure " + std::to_string(fig) + " --plot-scripts --out '" + d.string() + "'") == 0);
        CHECK(fs::exists(d / "summary.json"));
        CHECK(fs::exists(d / ("fig" + std::to_string(fig) + ".gp")));
    }
    CHECK(run_exe("reproduce --figure 2 --out '" + out.string() + "'") == 2);
}

TEST_CASE("repeated runs are byte-identical regardless of the thread budget") {
    const fs::path a = scratch("repeat_a");
    const fs::path b = scratch("repeat_b");
    const std::string args = "frf --config '" + scenario("beam_frf.json") + "' --out ";
    REQUIRE(run_exe(args + "'" + a.string() + "'", "SHUNTLAB_THREADS=1") == 0);
    REQUIRE(run_exe(args + "'" + b.string() + "'", "SHUNTLAB_THREADS=4") == 0);
    for (const char* f : {"frf.csv", "summary.json", "frf.gp"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const std::string text = slurp(a / "frf.csv");
    CHECK(text.find('\r') == std::string::npos);

    const fs::path c = scratch("repeat_c");
    const fs::path d = scratch("repeat_d");
    const std::string stab = "stabilize --config '" + scenario("beam_stabilize.json") + "' --out ";
    REQUIRE(run_exe(stab + "'" + c.string() + "'") == 0);
    REQUIRE(run_exe(stab + "'" + d.string() + "'", "SHUNTLAB_THREADS=2") == 0);
    for (const char* f : {"factors.csv", "placement.csv", "frf_stabilized.csv", "summary.json"})
        CHECK(slurp(c / f) == slurp(d / f));
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("exit");
    const std::string out = " --out '" + (dir / "out").string() + "'";

    auto cfg = write_config(dir, std::string(R"({"schema_version": 1, )") + kBeamModel + R"(, "tunning": {}})");
    CHECK(run_exe("tune --config '" + cfg.string() + "'" + out) == 2);

    cfg = write_config(dir, std::string(R"({"schema_version": 1, "analysis": "frf", )") + kBeamModel + "}");
    CHECK(run_exe("tune --config '" + cfg.string() + "'" + out) == 2);

    cfg = write_config(dir, "{ not json");
    CHECK(run_exe("tune --config '" + cfg.string() + "'" + out) == 2);
    CHECK(run_exe("tune --config '" + (dir / "missing.json").string() + "'" + out) == 2);
    CHECK(run_exe("tune" + out) == 2);
    CHECK(run_exe("unknowncommand") == 2);

    cfg = write_config(dir, R"({"schema_version": 1, "model": {"type": "normalized", "kc": 1.5}})");
    CHECK(run_exe("tune --config '" + cfg.string() + "'" + out) == 2);

    cfg = write_config(dir, R"({"schema_version": 1, "model": {"type": "normalized", "kc": 0.1},
                               "margins": {"band_low": 10, "band_high": 100}})");
    CHECK(run_exe("margins --config '" + cfg.string() + "'" + out) == 3);

    cfg = write_config(dir, R"({"schema_version": 1, "model": {"type": "normalized", "kc": 0.1}})");
    CHECK(run_exe("margins --config '" + cfg.string() + "'" + out) == 0);
    CHECK(run_exe("simulate --config '" + cfg.string() + "'" + out) == 2);
}

TEST_CASE("run maps errors without touching the process") {
    std::ostringstream log, err;
    RunRequest req;
    req.command = "reproduce";
    CHECK(run(req, log, err) == kConfigError);
    CHECK(err.str().find("--figure") != std::string::npos);
}
