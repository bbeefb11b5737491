#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "semisup/io.hpp"
#include "semisup/pmf.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    const char* bin = std::getenv("SEMISUP_CLI");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) r.output.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("semisup_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = temp_dir() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("estimate: hand example round-trips through the JSON output") {
    const fs::path input = write_temp("samples.csv",
                                      "x,y\n"
                                      "0,0\n"
                                      "0,1\n"
                                      "1,1\n"
                                      "0,\n"
                                      "0,\n"
                                      "1,\n");
    const fs::path out = temp_dir() / "estimate.json";
    const RunResult r = run("estimate --input " + input.string() +
                            " --marginal empirical --conditional add_constant:1 --pool-x 0 --out " +
                            out.string());
    INFO(r.output);
    REQUIRE(r.exit_code == 0);

    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    const semisup::JointPmf joint = semisup::joint_estimate_from_json(j);
    REQUIRE(std::abs(joint.at(0, 0) - 1.0 / 3.0) <= 1e-12);
    REQUIRE(std::abs(joint.at(0, 1) - 1.0 / 3.0) <= 1e-12);
    REQUIRE(std::abs(joint.at(1, 0) - 1.0 / 9.0) <= 1e-12);
    REQUIRE(std::abs(joint.at(1, 1) - 2.0 / 9.0) <= 1e-12);
    REQUIRE(r.output.find("marginal") != std::string::npos);
    REQUIRE(r.output.find("conditional rows") != std::string::npos);
}

TEST_CASE("estimate: labeled-only input is fine, header-only needs explicit sizes") {
    const fs::path labeled_only = write_temp("labeled_only.csv", "x,y\n0,0\n1,1\n0,1\n");
    const fs::path out = temp_dir() / "labeled_only.json";
    const RunResult ok = run("estimate --input " + labeled_only.string() + " --out " + out.string());
    INFO(ok.output);
    REQUIRE(ok.exit_code == 0);
    const semisup::JointPmf joint = semisup::joint_estimate_from_json(nlohmann::json::parse(slurp(out)));
    double sum = 0.0;
    for (double v : joint.flat()) sum += v;
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));

    const fs::path header_only = write_temp("header_only.csv", "x,y\n");
    const RunResult bad = run("estimate --input " + header_only.string());
    REQUIRE(bad.exit_code == 2);
    REQUIRE(bad.output.find("--kx") != std::string::npos);
}

TEST_CASE("estimate: parse errors carry line numbers, bad symbols are data errors") {
    const fs::path bad_field = write_temp("bad_field.csv", "x,y\n0,0\nfoo,1\n");
    const RunResult r1 = run("estimate --input " + bad_field.string());
    REQUIRE(r1.exit_code == 3);
    REQUIRE(r1.output.find("line 3") != std::string::npos);

    const fs::path out_of_range = write_temp("oor.csv", "x,y\n0,0\n1,5\n");
    const RunResult r2 = run("estimate --input " + out_of_range.string() + " --kx 2 --ky 2");
    REQUIRE(r2.exit_code == 3);

    const RunResult r3 = run("estimate --input " + (temp_dir() / "does_not_exist.csv").string());
    REQUIRE(r3.exit_code == 3);
}

TEST_CASE("sweep: deterministic CSV, schema, and seed sensitivity") {
    const auto cfg_text = [](const std::string& out_stem) {
        return "loss = l2\n"
               "k_x = 2\n"
               "k_y = 2\n"
               "m_list = 20\n"
               "n_list = 100\n"
               "trials = 400\n"
               "seed = 5\n"
               "out_csv = " + out_stem + ".csv\n"
               "out_json = " + out_stem + ".json\n";
    };
    const fs::path cfg1 = write_temp("sweep1.cfg", cfg_text((temp_dir() / "s1").string()));
    const fs::path cfg2 = write_temp("sweep2.cfg", cfg_text((temp_dir() / "s2").string()));

    const RunResult r1 = run("sweep --config " + cfg1.string());
    INFO(r1.output);
    REQUIRE(r1.exit_code == 0);
    const RunResult r2 = run("sweep --config " + cfg2.string());
    REQUIRE(r2.exit_code == 0);

    const std::string csv1 = slurp(temp_dir() / "s1.csv");
    const std::string csv2 = slurp(temp_dir() / "s2.csv");
    REQUIRE(csv1 == csv2);  // byte-identical for identical config
    REQUIRE(csv1.rfind("m,n,loss,risk_mc,risk_se,risk_theory,ratio\n", 0) == 0);
    REQUIRE(csv1.find("20,100,l2,") != std::string::npos);

    const nlohmann::json j = nlohmann::json::parse(slurp(temp_dir() / "s1.json"));
    REQUIRE(j.at("version").get<std::string>() == "0.1.0");
    REQUIRE(j.at("records").size() == 1);
    REQUIRE(j.at("records")[0].at("risk_theory").get<double>() > 0.0);
    const double ratio = j.at("records")[0].at("ratio").get<double>();
    const double mc = j.at("records")[0].at("risk_mc").get<double>();
    const double th = j.at("records")[0].at("risk_theory").get<double>();
    REQUIRE(ratio == Catch::Approx(mc / th));
    REQUIRE(j.at("config").at("pool_x").get<bool>() == true);

    // a different seed changes the measured column
    const RunResult r3 = run("sweep --config " + cfg1.string() + " --seed 6");
    REQUIRE(r3.exit_code == 0);
    REQUIRE(slurp(temp_dir() / "s1.csv") != csv2);
}

TEST_CASE("sweep: risk column decreases along a fixed n/m ratio") {
    const fs::path stem = temp_dir() / "trend";
    const fs::path cfg = write_temp("trend.cfg",
                                    "loss = l2\n"
                                    "k_x = 2\n"
                                    "k_y = 2\n"
                                    "m_list = 20, 80, 320\n"
                                    "n_list = 100, 400, 1600\n"
                                    "trials = 2000\n"
                                    "seed = 9\n"
                                    "out_csv = " + stem.string() + ".csv\n"
                                    "out_json = " + stem.string() + ".json\n");
    const RunResult r = run("sweep --config " + cfg.string());
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(fs::path(stem.string() + ".json")));
    double prev_mean = 1e9, prev_se = 0.0;
    for (const auto& rec : j.at("records")) {
        const double mean = rec.at("risk_mc").get<double>();
        const double se = rec.at("risk_se").get<double>();
        REQUIRE(mean + 4.0 * std::hypot(se, prev_se) < prev_mean);
        prev_mean = mean;
        prev_se = se;
    }
}

TEST_CASE("sweep: config validation reports every violation at once") {
    const fs::path cfg = write_temp("bad.cfg",
                                    "loss = l7\n"
                                    "k_x = 1\n"
                                    "m_list = 10, -3\n"
                                    "n_list = 100\n"
                                    "trials = 5\n"
                                    "pool_x = maybe\n");
    const RunResult r = run("sweep --config " + cfg.string());
    REQUIRE(r.exit_code == 2);
    for (const char* needle : {"loss 'l7'", "k_y must be given", "must be positive",
                               "equal lengths", "trials must be given and >= 100", "pool_x"}) {
        INFO(r.output);
        REQUIRE(r.output.find(needle) != std::string::npos);
    }
}

TEST_CASE("verify: suite selection and exit codes") {
    const RunResult unknown = run("verify nonsense");
    REQUIRE(unknown.exit_code == 2);

    const RunResult bounds = run("verify bounds");
    INFO(bounds.output);
    REQUIRE(bounds.exit_code == 0);
    REQUIRE(bounds.output.find("[PASS] criterion 6") != std::string::npos);
    REQUIRE(bounds.output.find("[PASS] criterion 7") != std::string::npos);
    REQUIRE(bounds.output.find("[PASS] criterion 8") != std::string::npos);

    const RunResult as_json = run("verify bounds --json");
    REQUIRE(as_json.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(as_json.output);
    REQUIRE(j.at("all_pass").get<bool>());
    REQUIRE(j.at("checks").size() == 3);
}

TEST_CASE("bounds: human output is finite, CSV schema is exact") {
    const RunResult human = run("bounds --n 500 --p 1.5 --x 0 --x 0.3");
    INFO(human.output);
    REQUIRE(human.exit_code == 0);
    REQUIRE(human.output.find("nan") == std::string::npos);
    REQUIRE(human.output.find("Bernstein") != std::string::npos);

    const fs::path out = temp_dir() / "bounds.csv";
    const RunResult csv = run("bounds --n 500 --p 1.5 --x 0 --x 0.3 --csv --out " + out.string());
    REQUIRE(csv.exit_code == 0);
    const std::string content = slurp(out);
    REQUIRE(content.rfind("h_np,g_np,gap_ratio,prediction\n", 0) == 0);
    REQUIRE(content.substr(content.find('\n') + 1, 8) == "0,0,0,0\n");

    const RunResult bad = run("bounds --p 3");
    REQUIRE(bad.exit_code == 2);
}

TEST_CASE("parse_sample_csv unit paths") {
    std::istringstream ok("x,y\n1,2\n0,\n");
    const semisup::ParsedSamples p = semisup::parse_sample_csv(ok);
    REQUIRE(p.labeled.size() == 1);
    REQUIRE(p.unlabeled.size() == 1);
    REQUIRE(p.max_x == 1);
    REQUIRE(p.max_y == 2);

    std::istringstream no_header("0,1\n");
    REQUIRE_THROWS_AS(semisup::parse_sample_csv(no_header), semisup::ParseError);
    std::istringstream empty("");
    REQUIRE_THROWS_AS(semisup::parse_sample_csv(empty), semisup::ParseError);
    std::istringstream negative("x,y\n-1,0\n");
    REQUIRE_THROWS_AS(semisup::parse_sample_csv(negative), semisup::ParseError);
}
